//! Command-line interface.
//!
//! Exit status: 0 success, 1 a check failed (`verify`, or `validate` on an
//! invalid map), 2 unreadable input or bad options, 3 a numerical method
//! did not converge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynspec_core::chebyshev::{self, argmin_subleading};
use dynspec_core::correlation::{fit_decay, EnsembleConfig, FitWindow, Observable, DEFAULT_BUDGET};
use dynspec_core::linearize::linearize;
use dynspec_core::rng::CounterRng;
use dynspec_core::spectral::{self, diagonal_spectrum};
use dynspec_core::transfer_matrix::assemble;
use dynspec_core::{correlation, IntervalMap, PiecewiseLinearMarkovMap, SmoothFullBranchMap};
use serde::Serialize;

use crate::io::{LoadedMap, MapFile};
use crate::output::{self, Artifact, Format, SpectralReportJson, Table};
use crate::parallel;
use crate::verify;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "dynspec", version, about = "Transfer operator spectra of expanding interval maps")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: DYN_SPEC_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check partition, Markov property, expansion and mixing of a map file.
    Validate { map: PathBuf },
    /// Block transfer matrix spectrum of a piecewise linear map.
    Spectrum(SpectrumArgs),
    /// Topological pressure on a grid of β.
    Pressure(PressureArgs),
    /// Lyapunov exponent, exact or by quadrature, optionally with an orbit estimate.
    Lyapunov(LyapunovArgs),
    /// Piecewise linear approximation of a smooth map on cylinder sets.
    Linearize(LinearizeArgs),
    /// Chebyshev collocation spectrum of a smooth map.
    Cheb(ChebArgs),
    /// Collocation spectrum across the Möbius parameter.
    Sweep(SweepArgs),
    /// Monte Carlo correlation function and decay fit.
    Correlate(CorrelateArgs),
    /// Run every applicable bound and identity check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Eigenvalues,
    Matrix,
    Blocks,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// What the CSV output contains.
    #[arg(long, value_enum, default_value_t = Dump::Eigenvalues)]
    pub dump: Dump,
}

#[derive(Debug, Args)]
pub struct PressureArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 0.25)]
    pub beta_step: f64,
    /// Collocation order for smooth maps.
    #[arg(long, default_value_t = 25)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 25)]
    pub order: usize,
    /// Also estimate along an orbit of this many steps.
    #[arg(long)]
    pub orbit: Option<usize>,
    /// Orbit start; drawn from the seed when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    pub map: PathBuf,
    #[arg(long)]
    pub level: usize,
    /// Write the level-n map as a map file instead of the per-level summary.
    #[arg(long)]
    pub emit: bool,
}

#[derive(Debug, Args)]
pub struct ChebArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 25)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Eigenvalues listed, largest modulus first.
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// CSV output is the invariant density at the nodes.
    #[arg(long)]
    pub density: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = -0.24, allow_negative_numbers = true)]
    pub c_min: f64,
    #[arg(long, default_value_t = 0.49, allow_negative_numbers = true)]
    pub c_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub c_step: f64,
    #[arg(long, default_value_t = 25)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 6)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableKind {
    Identity,
    Step,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    pub map: PathBuf,
    #[arg(long, value_enum, default_value_t = ObservableKind::Step)]
    pub observable: ObservableKind,
    /// Step size of the step observable.
    #[arg(long, default_value_t = 0.0)]
    pub h: f64,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub ensemble: u64,
    #[arg(long, default_value_t = 2_000)]
    pub length: usize,
    #[arg(long, default_value_t = 100)]
    pub transient: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub shards: u64,
    /// Cap on E·L·(n_max+1).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// `early`, `tail` or a lag range `lo:hi`.
    #[arg(long)]
    pub fit: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub map: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Collocation order for smooth maps.
    #[arg(long, default_value_t = 25)]
    pub order: usize,
    /// Largest iterate in the inf-derivative rates for smooth maps.
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
}

/// What a command produced, and the error to report after writing it.
struct Outcome {
    artifact: Artifact,
    status: Result<(), CliError>,
}

impl From<Artifact> for Outcome {
    fn from(artifact: Artifact) -> Self {
        Outcome { artifact, status: Ok(()) }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let threads = parallel::thread_count(cli.threads)?;
    let outcome = parallel::with_threads(threads, || execute(cli.command))??;
    outcome.artifact.write(cli.format, cli.output.as_deref())?;
    outcome.status
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate { map } => validate(&map),
        Command::Spectrum(a) => spectrum(&a).map(Outcome::from),
        Command::Pressure(a) => pressure(&a).map(Outcome::from),
        Command::Lyapunov(a) => lyapunov(&a).map(Outcome::from),
        Command::Linearize(a) => linearize_cmd(&a).map(Outcome::from),
        Command::Cheb(a) => cheb(&a).map(Outcome::from),
        Command::Sweep(a) => sweep(&a).map(Outcome::from),
        Command::Correlate(a) => correlate(&a),
        Command::Verify(a) => verify_cmd(&a),
    }
}

fn linear(map: LoadedMap, command: &str) -> Result<PiecewiseLinearMarkovMap, CliError> {
    match map {
        LoadedMap::Linear(m) => Ok(m),
        LoadedMap::Smooth(_) => Err(CliError::config(format!("{command} needs a piecewise_linear map (try cheb)"))),
    }
}

fn smooth(map: LoadedMap, command: &str) -> Result<SmoothFullBranchMap, CliError> {
    match map {
        LoadedMap::Smooth(m) => Ok(m),
        LoadedMap::Linear(_) => Err(CliError::config(format!("{command} needs a moebius map"))),
    }
}

fn describe(r: &dynspec_core::Result<()>) -> String {
    match r {
        Ok(()) => "ok".to_string(),
        Err(e) => e.to_string(),
    }
}

#[derive(Serialize)]
struct ValidateJson {
    kind: &'static str,
    valid: bool,
    coverage: String,
    expanding: String,
    markov: String,
    mixing: Option<bool>,
    error: Option<String>,
}

fn validate(path: &Path) -> Result<Outcome, CliError> {
    let file = MapFile::read(path)?;
    let built = file.build();
    let error = built.as_ref().err().map(|e| e.to_string());
    let report = match file.validation() {
        Some(v) => ValidateJson {
            kind: "piecewise_linear",
            valid: built.is_ok(),
            coverage: describe(&v.coverage),
            expanding: describe(&v.expanding),
            markov: describe(&v.markov),
            mixing: v.transition.as_ref().map(|t| t.is_mixing()),
            error,
        },
        // Full-branch maps are Markov and mixing once the parameter is in range.
        None => {
            let ok = error.clone().unwrap_or_else(|| "ok".to_string());
            ValidateJson {
                kind: "moebius",
                valid: built.is_ok(),
                coverage: ok.clone(),
                expanding: ok.clone(),
                markov: ok,
                mixing: built.is_ok().then_some(true),
                error,
            }
        }
    };
    let mut t = Table::new("check,result");
    t.row(["coverage", report.coverage.as_str()]);
    t.row(["expanding", report.expanding.as_str()]);
    t.row(["markov", report.markov.as_str()]);
    let status = match built {
        Ok(_) => Ok(()),
        Err(e) => Err(CliError::Verification(vec![e.to_string()])),
    };
    Ok(Outcome { artifact: Artifact::new(&report, Some(t)), status })
}

#[derive(Serialize)]
struct BetaSpectrumJson {
    beta: f64,
    degree: usize,
    eigenvalues: Vec<(f64, f64, usize)>,
    pressure: f64,
}

fn spectrum(a: &SpectrumArgs) -> Result<Artifact, CliError> {
    let map = linear(crate::io::load(&a.map)?, "spectrum")?;
    let table = match a.dump {
        Dump::Matrix => Some(output::matrix_table(&assemble(&map, a.beta, a.degree)?.dense())),
        Dump::Blocks => Some(output::block_table(&assemble(&map, a.beta, a.degree)?)),
        Dump::Eigenvalues => None,
    };
    if a.beta == 1.0 && a.dump == Dump::Eigenvalues {
        let r = spectral::mixing_rate(&map, a.degree)?;
        return Ok(Artifact::new(&SpectralReportJson::from(&r), Some(output::block_eigen_table(&r.spectrum))));
    }
    let s = diagonal_spectrum(&map, a.beta, a.degree)?;
    let table = table.unwrap_or_else(|| output::block_eigen_table(&s));
    let report = BetaSpectrumJson {
        beta: a.beta,
        degree: a.degree,
        eigenvalues: s.iter().map(|e| (e.value.re, e.value.im, e.block)).collect(),
        pressure: spectral::pressure(&map, a.beta)?,
    };
    Ok(Artifact::new(&report, Some(table)))
}

#[derive(Serialize)]
struct PressureJson {
    betas: Vec<f64>,
    pressure: Vec<f64>,
}

fn pressure(a: &PressureArgs) -> Result<Artifact, CliError> {
    let betas = parallel::parameter_grid(a.beta_min, a.beta_max, a.beta_step)?;
    let values = match crate::io::load(&a.map)? {
        LoadedMap::Linear(m) => betas.iter().map(|&b| spectral::pressure(&m, b)).collect::<Result<Vec<_>, _>>()?,
        // ln of the leading collocation eigenvalue
        LoadedMap::Smooth(f) => betas
            .iter()
            .map(|&b| Ok(chebyshev::spectrum(&f, b, a.order)?.leading.re.ln()))
            .collect::<Result<Vec<_>, CliError>>()?,
    };
    let table = output::pressure_table(&betas, &values);
    Ok(Artifact::new(&PressureJson { betas, pressure: values }, Some(table)))
}

#[derive(Serialize)]
struct OrbitJson {
    x0: f64,
    steps: usize,
    value: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct LyapunovJson {
    method: &'static str,
    value: f64,
    orbit: Option<OrbitJson>,
}

fn orbit_estimate<M: IntervalMap + ?Sized>(map: &M, a: &LyapunovArgs) -> Result<Option<OrbitJson>, CliError> {
    let Some(steps) = a.orbit else { return Ok(None) };
    let dom = map.state_space();
    let x0 = a.x0.unwrap_or_else(|| dom.lerp(CounterRng::new(a.seed).next_f64()));
    let est = correlation::lyapunov_orbit(map, x0, steps)?;
    Ok(Some(OrbitJson { x0, steps, value: est.value, stderr: est.stderr }))
}

fn lyapunov(a: &LyapunovArgs) -> Result<Artifact, CliError> {
    let report = match crate::io::load(&a.map)? {
        LoadedMap::Linear(m) => {
            LyapunovJson { method: "exact", value: spectral::lyapunov_exact(&m)?, orbit: orbit_estimate(&m, a)? }
        }
        LoadedMap::Smooth(f) => LyapunovJson {
            method: "quadrature",
            value: chebyshev::lyapunov_smooth(&f, a.order)?,
            orbit: orbit_estimate(&f, a)?,
        },
    };
    let mut t = Table::new("method,value,stderr");
    t.row([report.method.to_string(), output::num(report.value), "0".to_string()]);
    if let Some(o) = &report.orbit {
        t.row(["orbit".to_string(), output::num(o.value), output::num(o.stderr)]);
    }
    Ok(Artifact::new(&report, Some(t)))
}

#[derive(Serialize)]
struct LevelJson {
    level: usize,
    elements: usize,
    lyapunov: f64,
    nu2: f64,
    mixing_rate: f64,
    bounds_pass: bool,
}

fn linearize_cmd(a: &LinearizeArgs) -> Result<Artifact, CliError> {
    let f = smooth(crate::io::load(&a.map)?, "linearize")?;
    if a.emit {
        let file = MapFile::from_linear(&linearize(&f, a.level)?);
        return Ok(Artifact { json: file.to_json(), table: None });
    }
    let mut levels = Vec::new();
    let mut t = Table::new("level,elements,lyapunov,nu2,mixing_rate");
    for n in 1..=a.level {
        let m = linearize(&f, n)?;
        let v = spectral::verify_bounds(&m, 3)?;
        let row = LevelJson {
            level: n,
            elements: m.len(),
            lyapunov: v.lambda_exp,
            nu2: (-v.minus_ln_nu2).exp(),
            mixing_rate: v.alpha,
            bounds_pass: v.all_pass(),
        };
        t.row([
            n.to_string(),
            row.elements.to_string(),
            output::num(row.lyapunov),
            output::num(row.nu2),
            output::num(row.mixing_rate),
        ]);
        levels.push(row);
    }
    Ok(Artifact::new(&levels, Some(t)))
}

#[derive(Serialize)]
struct ChebJson {
    order: usize,
    beta: f64,
    eigenvalues: Vec<(f64, f64)>,
    moduli: Vec<f64>,
    leading: f64,
    subleading_modulus: f64,
    mixing_rate: f64,
    lyapunov: f64,
    density_residual: f64,
}

fn cheb(a: &ChebArgs) -> Result<Artifact, CliError> {
    let f = smooth(crate::io::load(&a.map)?, "cheb")?;
    let op = chebyshev::build(&f, a.beta, a.order)?;
    let eig = op.eigenvalues()?;
    if eig.len() < 2 {
        return Err(CliError::config("order too small for a subleading eigenvalue"));
    }
    let shown: Vec<_> = eig.iter().take(a.count).copied().collect();
    let (lyapunov, residual, density_table) = if a.beta == 1.0 {
        let h = chebyshev::density_of(&op)?;
        (chebyshev::lyapunov_against(&f, &h), h.residual(), Some(output::density_table(&h)))
    } else {
        (f64::NAN, f64::NAN, None)
    };
    let table = if a.density {
        Some(density_table.ok_or_else(|| CliError::config("--density needs beta = 1"))?)
    } else {
        Some(output::rank_eigen_table(&shown))
    };
    let report = ChebJson {
        order: a.order,
        beta: a.beta,
        eigenvalues: shown.iter().map(|z| (z.re, z.im)).collect(),
        moduli: shown.iter().map(|z| z.norm()).collect(),
        leading: eig[0].re,
        subleading_modulus: eig[1].norm(),
        mixing_rate: -eig[1].norm().ln(),
        lyapunov,
        density_residual: residual,
    };
    Ok(Artifact::new(&report, table))
}

#[derive(Serialize)]
struct SweepJson {
    order: usize,
    beta: f64,
    argmin_c: f64,
    min_subleading: f64,
    rows: Vec<(f64, usize, f64, f64, f64)>,
}

fn sweep(a: &SweepArgs) -> Result<Artifact, CliError> {
    let grid = parallel::parameter_grid(a.c_min, a.c_max, a.c_step)?;
    let rows = parallel::sweep(&grid, a.beta, a.order, a.count)?;
    let (argmin_c, min_subleading) =
        argmin_subleading(&rows).ok_or_else(|| CliError::config("sweep needs count >= 2"))?;
    let report = SweepJson {
        order: a.order,
        beta: a.beta,
        argmin_c,
        min_subleading,
        rows: rows.iter().map(|r| (r.c, r.rank, r.value.re, r.value.im, r.modulus)).collect(),
    };
    Ok(Artifact::new(&report, Some(output::sweep_table(&rows))))
}

fn parse_window(s: &str) -> Result<FitWindow, CliError> {
    match s {
        "early" => Ok(FitWindow::Early),
        "tail" => Ok(FitWindow::Tail),
        _ => {
            let bad = || CliError::config(format!("--fit must be early, tail or lo:hi, got {s:?}"));
            let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok(FitWindow::Range(lo, hi))
        }
    }
}

#[derive(Serialize)]
struct FitJson {
    rate: f64,
    intercept: f64,
    lags: Vec<usize>,
    residual: f64,
}

#[derive(Serialize)]
struct CorrelateJson {
    seed: u64,
    ensemble: u64,
    length: usize,
    transient: usize,
    shards: u64,
    c: Vec<f64>,
    cnorm: Vec<f64>,
    stderr: Vec<f64>,
    usable_lags: Vec<usize>,
    fit: Option<FitJson>,
    fit_error: Option<String>,
}

fn correlate(a: &CorrelateArgs) -> Result<Outcome, CliError> {
    let window = a.fit.as_deref().map(parse_window).transpose()?;
    let phi = match a.observable {
        ObservableKind::Identity => Observable::Identity,
        ObservableKind::Step => Observable::step(a.h),
    };
    let cfg = EnsembleConfig {
        n_max: a.n_max,
        ensemble: a.ensemble,
        length: a.length,
        transient: a.transient,
        seed: a.seed,
        shards: a.shards,
        budget: a.budget,
    };
    let series = match crate::io::load(&a.map)? {
        LoadedMap::Linear(m) => parallel::simulate(&m, &phi, &phi, &cfg)?,
        LoadedMap::Smooth(f) => parallel::simulate(&f, &phi, &phi, &cfg)?,
    };
    let fit = window.map(|w| fit_decay(&series, w));
    let (fit_json, fit_error, status) = match fit {
        None => (None, None, Ok(())),
        Some(Ok(f)) => {
            (Some(FitJson { rate: f.rate, intercept: f.intercept, lags: f.lags, residual: f.residual }), None, Ok(()))
        }
        Some(Err(e)) => (None, Some(e.to_string()), Err(CliError::Core(e))),
    };
    let report = CorrelateJson {
        seed: cfg.seed,
        ensemble: cfg.ensemble,
        length: cfg.length,
        transient: cfg.transient,
        shards: cfg.shards,
        c: series.c.clone(),
        cnorm: series.normalized(),
        stderr: series.stderr.clone(),
        usable_lags: series.usable_lags(),
        fit: fit_json,
        fit_error,
    };
    Ok(Outcome { artifact: Artifact::new(&report, Some(output::correlation_table(&series))), status })
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let report = match crate::io::load(&a.map)? {
        LoadedMap::Linear(m) => verify::verify_linear(&m, a.degree, &verify::default_beta_grid())?,
        LoadedMap::Smooth(f) => verify::verify_smooth(&f, a.order, a.k_max)?,
    };
    let status = if report.passed { Ok(()) } else { Err(CliError::Verification(report.failures.clone())) };
    let table = report.table();
    Ok(Outcome { artifact: Artifact::new(&report, Some(table)), status })
}
