//! Random mixing piecewise linear Markov maps, for property tests.
//!
//! Breakpoints are drawn uniformly on `[0,1]`. Each branch maps its element
//! onto a random run of consecutive elements, so the Markov property holds
//! by construction; draws are repeated until the slopes are in range and
//! the transition matrix is mixing.

use alloc::vec::Vec;

use crate::map_model::PiecewiseLinearMarkovMap;
use crate::rng::CounterRng;
use crate::{Error, Result};

/// Slope signs of the generated branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPattern {
    AllPositive,
    AllNegative,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMapConfig {
    pub min_elements: usize,
    pub max_elements: usize,
    pub min_slope: f64,
    pub max_slope: f64,
    /// Smallest allowed element length.
    pub min_gap: f64,
    pub signs: SignPattern,
    pub max_attempts: usize,
}

impl Default for RandomMapConfig {
    fn default() -> Self {
        RandomMapConfig {
            min_elements: 2,
            max_elements: 6,
            min_slope: 1.1,
            max_slope: 10.0,
            min_gap: 0.02,
            signs: SignPattern::Mixed,
            max_attempts: 10_000,
        }
    }
}

fn attempt(rng: &mut CounterRng, cfg: &RandomMapConfig) -> Option<PiecewiseLinearMarkovMap> {
    let span = (cfg.max_elements - cfg.min_elements + 1) as u64;
    let n = cfg.min_elements + rng.below(span) as usize;
    let mut inner: Vec<f64> = (0..n - 1).map(|_| rng.next_f64()).collect();
    inner.sort_by(f64::total_cmp);
    let mut bp = Vec::with_capacity(n + 1);
    bp.push(0.0);
    bp.extend(inner);
    bp.push(1.0);
    if bp.windows(2).any(|w| w[1] - w[0] < cfg.min_gap) {
        return None;
    }
    let mut branches = Vec::with_capacity(n);
    for k in 0..n {
        let len = bp[k + 1] - bp[k];
        let candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a..n).map(move |b| (a, b)))
            .filter(|&(a, b)| {
                let s = (bp[b + 1] - bp[a]) / len;
                s >= cfg.min_slope && s <= cfg.max_slope
            })
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let (a, b) = candidates[rng.below(candidates.len() as u64) as usize];
        let negative = match cfg.signs {
            SignPattern::AllPositive => false,
            SignPattern::AllNegative => true,
            SignPattern::Mixed => rng.coin(),
        };
        let (lo, hi) = (bp[a], bp[b + 1]);
        let slope = (hi - lo) / len;
        branches.push(if negative {
            (-slope, hi + slope * bp[k])
        } else {
            (slope, lo - slope * bp[k])
        });
    }
    PiecewiseLinearMarkovMap::new(bp, branches).ok().filter(|m| m.is_mixing())
}

/// Draws a random mixing map.
pub fn random_markov_map(rng: &mut CounterRng, cfg: &RandomMapConfig) -> Result<PiecewiseLinearMarkovMap> {
    if cfg.min_elements < 1 || cfg.max_elements < cfg.min_elements || !(cfg.min_slope > 1.0) {
        return Err(Error::InvalidArgument("invalid random map configuration"));
    }
    for _ in 0..cfg.max_attempts {
        if let Some(map) = attempt(rng, cfg) {
            return Ok(map);
        }
    }
    Err(Error::NotConverged { iterations: cfg.max_attempts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generates_valid_mixing_maps() {
        for signs in [SignPattern::AllPositive, SignPattern::AllNegative, SignPattern::Mixed] {
            let mut rng = CounterRng::new(42);
            let cfg = RandomMapConfig { signs, ..Default::default() };
            for _ in 0..20 {
                let map = random_markov_map(&mut rng, &cfg).unwrap();
                assert!(map.is_mixing());
                assert!((2..=6).contains(&map.len()));
                for g in map.slopes() {
                    assert!(g.abs() >= 1.1 - 1e-12 && g.abs() <= 10.0 + 1e-12);
                    match signs {
                        SignPattern::AllPositive => assert!(*g > 0.0),
                        SignPattern::AllNegative => assert!(*g < 0.0),
                        SignPattern::Mixed => {}
                    }
                }
            }
        }
    }
}
