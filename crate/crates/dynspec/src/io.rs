//! JSON map definition files.
//!
//! ```json
//! {"type":"piecewise_linear","domain":[0,1],"breakpoints":[0,0.5,1],
//!  "branches":[{"slope":2,"intercept":0},{"slope":-2,"intercept":2}]}
//! {"type":"moebius","c":-0.11}
//! ```

use std::path::Path;

use dynspec_core::map_model::{self, ValidationReport, DEFAULT_ALIGNMENT_TOL};
use dynspec_core::{Error, PiecewiseLinearMarkovMap, SmoothFullBranchMap};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub slope: f64,
    pub intercept: f64,
}

/// Parsed but not yet validated map file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFile {
    PiecewiseLinear { domain: [f64; 2], breakpoints: Vec<f64>, branches: Vec<BranchSpec> },
    Moebius { c: f64 },
}

/// A validated map.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMap {
    Linear(PiecewiseLinearMarkovMap),
    Smooth(SmoothFullBranchMap),
}

impl LoadedMap {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedMap::Linear(_) => "piecewise_linear",
            LoadedMap::Smooth(_) => "moebius",
        }
    }
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_linear(map: &PiecewiseLinearMarkovMap) -> Self {
        let d = map.domain();
        MapFile::PiecewiseLinear {
            domain: [d.lo(), d.hi()],
            breakpoints: map.breakpoints().to_vec(),
            branches: map
                .slopes()
                .iter()
                .zip(map.intercepts())
                .map(|(&slope, &intercept)| BranchSpec { slope, intercept })
                .collect(),
        }
    }

    /// Structural checks without building the map. `None` for the smooth
    /// family, whose only condition is the parameter range.
    pub fn validation(&self) -> Option<ValidationReport> {
        match self {
            MapFile::PiecewiseLinear { breakpoints, branches, .. } => {
                let pairs: Vec<(f64, f64)> = branches.iter().map(|b| (b.slope, b.intercept)).collect();
                Some(map_model::validate(breakpoints, &pairs, DEFAULT_ALIGNMENT_TOL))
            }
            MapFile::Moebius { .. } => None,
        }
    }

    pub fn build(&self) -> Result<LoadedMap, Error> {
        match self {
            MapFile::PiecewiseLinear { domain, breakpoints, branches } => {
                if breakpoints.first() != Some(&domain[0]) || breakpoints.last() != Some(&domain[1]) {
                    return Err(Error::NotAPartition("domain must match the outer breakpoints"));
                }
                let pairs = branches.iter().map(|b| (b.slope, b.intercept)).collect();
                Ok(LoadedMap::Linear(PiecewiseLinearMarkovMap::new(breakpoints.clone(), pairs)?))
            }
            MapFile::Moebius { c } => Ok(LoadedMap::Smooth(SmoothFullBranchMap::moebius(*c)?)),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("map files serialize");
        s.push('\n');
        s
    }
}

/// Reads, parses and validates a map file.
pub fn load(path: &Path) -> Result<LoadedMap, CliError> {
    Ok(MapFile::read(path)?.build()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let tent = MapFile::parse(
            r#"{"type":"piecewise_linear","domain":[0,1],"breakpoints":[0,0.5,1],
                "branches":[{"slope":2,"intercept":0},{"slope":-2,"intercept":2}]}"#,
        )
        .unwrap();
        assert_eq!(tent.build().unwrap(), LoadedMap::Linear(PiecewiseLinearMarkovMap::tent()));
        let m = MapFile::parse(r#"{"type":"moebius","c":-0.11}"#).unwrap();
        assert_eq!(m.build().unwrap().kind(), "moebius");
    }

    #[test]
    fn rejects_unknown_keys_and_types() {
        assert!(MapFile::parse(r#"{"type":"moebius","c":0.1,"order":3}"#).is_err());
        assert!(MapFile::parse(r#"{"type":"logistic","r":4}"#).is_err());
        assert!(MapFile::parse(
            r#"{"type":"piecewise_linear","domain":[0,1],"breakpoints":[0,1],"branches":[{"slope":2,"intercept":0,"x":1}]}"#
        )
        .is_err());
    }

    #[test]
    fn invalid_maps_report_core_errors() {
        let bad = MapFile::parse(
            r#"{"type":"piecewise_linear","domain":[0,1],"breakpoints":[0,1],"branches":[{"slope":0.5,"intercept":0}]}"#,
        )
        .unwrap();
        assert!(matches!(bad.build(), Err(Error::NotExpanding { branch: 0, .. })));
        assert!(!bad.validation().unwrap().is_valid());
        let shifted = MapFile::PiecewiseLinear {
            domain: [0.0, 2.0],
            breakpoints: vec![0.0, 0.5, 1.0],
            branches: vec![BranchSpec { slope: 2.0, intercept: 0.0 }, BranchSpec { slope: 2.0, intercept: -1.0 }],
        };
        assert!(matches!(shifted.build(), Err(Error::NotAPartition(_))));
        let c = MapFile::Moebius { c: 0.5 };
        assert!(matches!(c.build(), Err(Error::ParameterOutOfRange { .. })));
    }

    #[test]
    fn emitted_text_round_trips_exactly() {
        let golden = PiecewiseLinearMarkovMap::golden();
        let file = MapFile::from_linear(&golden);
        let back = MapFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.build().unwrap(), LoadedMap::Linear(golden));
    }
}
