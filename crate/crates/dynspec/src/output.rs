//! CSV tables and JSON reports.

use std::fmt::Write as _;
use std::path::Path;

use dynspec_core::chebyshev::{DensityInterpolant, SweepRow};
use dynspec_core::correlation::CorrelationSeries;
use dynspec_core::spectral::{BlockEigenvalue, SpectralReport};
use dynspec_core::transfer_matrix::BlockTransferMatrix;
use dynspec_core::{Complex, Matrix};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: &'static str,
    body: String,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Table { header, body: String::new() }
    }

    pub fn header(&self) -> &'static str {
        self.header
    }

    pub fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.body.push(',');
            }
            self.body.push_str(c.as_ref());
            first = false;
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header, self.body)
    }
}

/// Everything a command produces: a JSON document and, where the output
/// has a tabular form, a CSV table.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub json: String,
    pub table: Option<Table>,
}

impl Artifact {
    pub fn new<T: Serialize>(report: &T, table: Option<Table>) -> Self {
        let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
        json.push('\n');
        Artifact { json, table }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match (format, &self.table) {
            (Format::Json, _) => Ok(self.json.clone()),
            (Format::Csv, Some(t)) => Ok(t.render()),
            (Format::Csv, None) => Err(CliError::config("this command has no CSV output")),
        }
    }

    /// Writes to `path`, or stdout when absent.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

pub fn matrix_table(m: &Matrix) -> Table {
    let mut t = Table::new("row,col,value");
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            t.row([i.to_string(), j.to_string(), num(*v)]);
        }
    }
    t
}

pub fn block_table(t: &BlockTransferMatrix) -> Table {
    let mut out = Table::new("m,n,k,l,value");
    let size = t.elements();
    for m in 0..=t.degree() {
        for n in m..=t.degree() {
            let b = t.block(m, n).expect("upper blocks exist");
            for k in 0..size {
                for l in 0..size {
                    out.row([m.to_string(), n.to_string(), k.to_string(), l.to_string(), num(b.row(k)[l])]);
                }
            }
        }
    }
    out
}

pub fn block_eigen_table(spectrum: &[BlockEigenvalue]) -> Table {
    let mut t = Table::new("m,re,im,modulus");
    for e in spectrum {
        t.row([e.block.to_string(), num(e.value.re), num(e.value.im), num(e.value.norm())]);
    }
    t
}

pub fn rank_eigen_table(values: &[Complex]) -> Table {
    let mut t = Table::new("rank,re,im,modulus");
    for (rank, z) in values.iter().enumerate() {
        t.row([rank.to_string(), num(z.re), num(z.im), num(z.norm())]);
    }
    t
}

pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new("c,rank,re,im,modulus");
    for r in rows {
        t.row([num(r.c), r.rank.to_string(), num(r.value.re), num(r.value.im), num(r.modulus)]);
    }
    t
}

/// Density values at the collocation nodes.
pub fn density_table(h: &DensityInterpolant) -> Table {
    let mut t = Table::new("x,h(x)");
    for (x, v) in h.nodes().iter().zip(h.values()) {
        t.row([num(*x), num(*v)]);
    }
    t
}

pub fn correlation_table(s: &CorrelationSeries) -> Table {
    let mut t = Table::new("n,C,Cnorm,stderr");
    for (n, (c, cn)) in s.c.iter().zip(s.normalized()).enumerate() {
        t.row([n.to_string(), num(*c), num(cn), num(s.stderr[n])]);
    }
    t
}

pub fn pressure_table(betas: &[f64], values: &[f64]) -> Table {
    let mut t = Table::new("beta,pressure");
    for (b, p) in betas.iter().zip(values) {
        t.row([num(*b), num(*p)]);
    }
    t
}

/// Serialized form of [`SpectralReport`]. Eigenvalues are `[re, im, m]`
/// with `m` the diagonal block they come from; the density lists the
/// polynomial coefficients of each element in powers of `x`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReportJson {
    pub beta: f64,
    pub degree: usize,
    pub eigenvalues: Vec<(f64, f64, usize)>,
    pub leading: f64,
    pub subleading: (f64, f64, usize),
    pub subleading_modulus: f64,
    pub pressure: f64,
    pub lyapunov: f64,
    pub mixing_rate: f64,
    pub breakpoints: Vec<f64>,
    pub density: Vec<Vec<f64>>,
}

impl From<&SpectralReport> for SpectralReportJson {
    fn from(r: &SpectralReport) -> Self {
        let h = &r.invariant_density;
        SpectralReportJson {
            beta: r.beta,
            degree: r.degree,
            eigenvalues: r.spectrum.iter().map(|e| (e.value.re, e.value.im, e.block)).collect(),
            leading: r.leading,
            subleading: (r.subleading.value.re, r.subleading.value.im, r.subleading.block),
            subleading_modulus: r.subleading.value.norm(),
            pressure: r.pressure,
            lyapunov: r.lyapunov,
            mixing_rate: r.mixing_rate,
            breakpoints: h.breakpoints().to_vec(),
            density: (0..h.elements()).map(|k| h.element_coeffs(k).to_vec()).collect(),
        }
    }
}

/// Appends `key=value` pairs as a single human-readable line.
pub fn summary_line(pairs: &[(&str, f64)]) -> String {
    let mut s = String::new();
    for (i, (k, v)) in pairs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{k}={}", num(*v));
    }
    s
}
