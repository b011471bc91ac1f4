//! Monte Carlo correlation functions, decay-rate fits and orbit Lyapunov
//! exponents.
//!
//! An ensemble of `E` orbits starts from uniformly distributed points, skips
//! a transient of `T` steps and records `L` points each. The correlation
//! `C(n) = ⟨φ∘fⁿ · ψ⟩ − ⟨φ⟩⟨ψ⟩` is the pooled time average over all orbits.
//! The ensemble is cut into shards; shard `s` draws from the stream
//! `(seed, s)`, so the result does not depend on how shards are scheduled.

use alloc::vec::Vec;

use crate::map_model::{Interval, IntervalMap};
use crate::rng::CounterRng;
use crate::transfer_matrix::PiecewisePolynomial;
use crate::{num, Error, Result};

/// Relative size of the nudge applied to orbit points that land exactly on a
/// breakpoint.
pub const BREAKPOINT_NUDGE: f64 = 1e-15;

/// Default cap on `E · L · (n_max + 1)`.
pub const DEFAULT_BUDGET: u128 = 100_000_000_000;

/// Lags with `|C(n)|` above this many standard errors are usable in fits.
pub const USABLE_SIGMAS: f64 = 3.0;

/// Minimum number of usable lags for a fit.
pub const MIN_FIT_LAGS: usize = 4;

/// Observable `x ↦ φ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Constant(f64),
    Identity,
    /// `x` for `|x| < ½`, `x − sign(x)·h` otherwise.
    Step { h: f64 },
    Polynomial(PiecewisePolynomial),
    /// Linear interpolation of `values` on a uniform grid over `[lo, hi]`.
    Sampled { lo: f64, hi: f64, values: Vec<f64> },
}

impl Observable {
    pub fn step(h: f64) -> Self {
        Observable::Step { h }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Observable::Constant(c) => *c,
            Observable::Identity => x,
            Observable::Step { h } => {
                if x.abs() < 0.5 {
                    x
                } else {
                    x - x.signum() * h
                }
            }
            Observable::Polynomial(p) => {
                let b = p.breakpoints();
                let n = p.elements();
                let k = b.partition_point(|&v| v <= x).saturating_sub(1).min(n - 1);
                p.eval_on(k, x)
            }
            Observable::Sampled { lo, hi, values } => {
                let last = values.len() - 1;
                let t = ((x - lo) / (hi - lo) * last as f64).clamp(0.0, last as f64);
                let i = (t as usize).min(last.saturating_sub(1));
                let frac = t - i as f64;
                if last == 0 {
                    values[0]
                } else {
                    values[i] * (1.0 - frac) + values[i + 1] * frac
                }
            }
        }
    }

    /// Checks that the observable is defined on all of `domain`.
    pub fn check_domain(&self, domain: Interval) -> Result<()> {
        let covers = |lo: f64, hi: f64| lo <= domain.lo() && domain.hi() <= hi;
        match self {
            Observable::Polynomial(p) => {
                let b = p.breakpoints();
                if covers(b[0], b[b.len() - 1]) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("observable does not cover the map domain"))
                }
            }
            Observable::Sampled { lo, hi, values } => {
                if values.is_empty() || !(lo < hi) {
                    Err(Error::InvalidArgument("sampled observable needs values on lo < hi"))
                } else if covers(*lo, *hi) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("observable does not cover the map domain"))
                }
            }
            _ => Ok(()),
        }
    }
}

/// Ensemble protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_max: usize,
    /// Number of orbits `E`.
    pub ensemble: u64,
    /// Recorded points per orbit `L`.
    pub length: usize,
    /// Discarded steps per orbit `T`.
    pub transient: usize,
    pub seed: u64,
    /// Number of shards; also the number of batches for standard errors.
    pub shards: u64,
    /// Cap on `E · L · (n_max + 1)`.
    pub budget: u128,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_max: 20,
            ensemble: 1_000_000,
            length: 2_000,
            transient: 100,
            seed: 0,
            shards: 64,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl EnsembleConfig {
    pub fn check(&self) -> Result<()> {
        if (self.ensemble as u128) * (self.length as u128) < 10_000 {
            return Err(Error::InvalidArgument("ensemble size times series length must be at least 10^4"));
        }
        if self.length <= self.n_max {
            return Err(Error::InvalidArgument("series length must exceed the largest lag"));
        }
        if self.shards == 0 || self.shards > self.ensemble {
            return Err(Error::InvalidArgument("shard count must be between 1 and the ensemble size"));
        }
        let work = self.ensemble as u128 * self.length as u128 * (self.n_max as u128 + 1);
        if work > self.budget {
            return Err(Error::BudgetExceeded { work, cap: self.budget });
        }
        Ok(())
    }

    /// Orbit index range of shard `s`.
    pub fn shard_range(&self, s: u64) -> (u64, u64) {
        let e = self.ensemble as u128;
        let k = self.shards as u128;
        ((s as u128 * e / k) as u64, ((s as u128 + 1) * e / k) as u64)
    }
}

/// Raw sums of one shard.
#[derive(Debug, Clone, PartialEq)]
pub struct ShardSums {
    pub orbits: u64,
    pub points: u64,
    pub sum_phi: f64,
    pub sum_psi: f64,
    /// `Σ φ(x_{t+n}) ψ(x_t)` per lag.
    pub lag_sums: Vec<f64>,
    pub lag_counts: Vec<u64>,
}

impl ShardSums {
    pub fn empty(n_max: usize) -> Self {
        ShardSums {
            orbits: 0,
            points: 0,
            sum_phi: 0.0,
            sum_psi: 0.0,
            lag_sums: alloc::vec![0.0; n_max + 1],
            lag_counts: alloc::vec![0; n_max + 1],
        }
    }

    pub fn merge(&mut self, other: &ShardSums) {
        self.orbits += other.orbits;
        self.points += other.points;
        self.sum_phi += other.sum_phi;
        self.sum_psi += other.sum_psi;
        for (a, b) in self.lag_sums.iter_mut().zip(&other.lag_sums) {
            *a += b;
        }
        for (a, b) in self.lag_counts.iter_mut().zip(&other.lag_counts) {
            *a += b;
        }
    }

    /// `C(n)` from these sums alone.
    pub fn estimate(&self) -> Vec<f64> {
        let mean_phi = self.sum_phi / self.points as f64;
        let mean_psi = self.sum_psi / self.points as f64;
        self.lag_sums
            .iter()
            .zip(&self.lag_counts)
            .map(|(s, &c)| s / c as f64 - mean_phi * mean_psi)
            .collect()
    }
}

/// Nudges `x` off an exact breakpoint, towards the interior of the domain.
#[inline]
fn nudge<M: IntervalMap + ?Sized>(map: &M, dom: Interval, x: f64) -> f64 {
    if map.is_breakpoint(x) {
        let eps = BREAKPOINT_NUDGE * dom.len();
        if x >= dom.hi() {
            x - eps
        } else {
            x + eps
        }
    } else {
        x
    }
}

/// One orbit step with breakpoint nudging and clamping; returns the new
/// point and the derivative used.
#[inline]
fn advance<M: IntervalMap + ?Sized>(map: &M, dom: Interval, x: f64) -> (f64, f64) {
    let x = nudge(map, dom, x);
    let (y, d) = map.step(x);
    (y.clamp(dom.lo(), dom.hi()), d)
}

#[inline]
fn lag_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for j in 0..4 {
            acc[j] += a[4 * i + j] * b[4 * i + j];
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Orbits advanced together; independent orbits hide the latency of a step.
const LANES: usize = 8;

/// Sums of shard `s` of the ensemble.
pub fn simulate_shard<M: IntervalMap + ?Sized>(
    map: &M,
    phi: &Observable,
    psi: &Observable,
    cfg: &EnsembleConfig,
    s: u64,
) -> ShardSums {
    let dom = map.state_space();
    let len = cfg.length;
    let mut rng = CounterRng::new(cfg.seed).split(s);
    let (start, end) = cfg.shard_range(s);
    let mut sums = ShardSums::empty(cfg.n_max);
    let mut fphi = alloc::vec![0.0; LANES * len];
    let mut fpsi = alloc::vec![0.0; LANES * len];
    let mut orbit = start;
    while orbit < end {
        let lanes = ((end - orbit) as usize).min(LANES);
        let mut xs = [0.0f64; LANES];
        for x in xs.iter_mut().take(lanes) {
            *x = rng.uniform(dom.lo(), dom.hi());
        }
        for _ in 0..cfg.transient {
            for x in xs.iter_mut().take(lanes) {
                *x = advance(map, dom, *x).0;
            }
        }
        for t in 0..len {
            for (j, x) in xs.iter_mut().enumerate().take(lanes) {
                if t > 0 {
                    *x = advance(map, dom, *x).0;
                }
                fphi[j * len + t] = phi.eval(*x);
                fpsi[j * len + t] = psi.eval(*x);
            }
        }
        for j in 0..lanes {
            let a = &fphi[j * len..(j + 1) * len];
            let b = &fpsi[j * len..(j + 1) * len];
            sums.orbits += 1;
            sums.points += len as u64;
            sums.sum_phi += a.iter().sum::<f64>();
            sums.sum_psi += b.iter().sum::<f64>();
            for n in 0..=cfg.n_max {
                let count = len - n;
                sums.lag_sums[n] += lag_dot(&a[n..], &b[..count]);
                sums.lag_counts[n] += count as u64;
            }
        }
        orbit += lanes as u64;
    }
    sums
}

/// Estimated correlation function with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    /// `C(n)` for `n = 0..=n_max`.
    pub c: Vec<f64>,
    pub stderr: Vec<f64>,
    pub config: EnsembleConfig,
}

impl CorrelationSeries {
    /// Pools shard sums in order; standard errors come from the spread of
    /// the per-shard estimates.
    pub fn from_shards(config: EnsembleConfig, shards: &[ShardSums]) -> Self {
        let mut total = ShardSums::empty(config.n_max);
        for s in shards {
            total.merge(s);
        }
        let c = total.estimate();
        let k = shards.len() as f64;
        let per: Vec<Vec<f64>> = shards.iter().map(ShardSums::estimate).collect();
        let stderr = (0..=config.n_max)
            .map(|n| {
                if shards.len() < 2 {
                    return 0.0;
                }
                let mean = per.iter().map(|e| e[n]).sum::<f64>() / k;
                let var = per.iter().map(|e| (e[n] - mean) * (e[n] - mean)).sum::<f64>() / (k - 1.0);
                num::sqrt(var / k)
            })
            .collect();
        CorrelationSeries { c, stderr, config }
    }

    /// Series with given values and standard errors.
    pub fn from_values(c: Vec<f64>, stderr: Vec<f64>) -> Result<Self> {
        if c.len() != stderr.len() || c.is_empty() {
            return Err(Error::DimensionMismatch { expected: c.len(), found: stderr.len() });
        }
        let config = EnsembleConfig { n_max: c.len() - 1, ..EnsembleConfig::default() };
        Ok(CorrelationSeries { c, stderr, config })
    }

    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `C(n) / C(0)`.
    pub fn normalized(&self) -> Vec<f64> {
        self.c.iter().map(|v| v / self.c[0]).collect()
    }

    /// Lags `n ≥ 1` with `|C(n)| > 3·stderr(n)`.
    pub fn usable_lags(&self) -> Vec<usize> {
        (1..self.c.len())
            .filter(|&n| self.c[n].is_finite() && self.c[n].abs() > USABLE_SIGMAS * self.stderr[n] && self.c[n] != 0.0)
            .collect()
    }
}

/// Runs all shards serially.
pub fn simulate<M: IntervalMap + ?Sized>(
    map: &M,
    phi: &Observable,
    psi: &Observable,
    cfg: &EnsembleConfig,
) -> Result<CorrelationSeries> {
    cfg.check()?;
    phi.check_domain(map.state_space())?;
    psi.check_domain(map.state_space())?;
    let shards: Vec<ShardSums> = (0..cfg.shards).map(|s| simulate_shard(map, phi, psi, cfg, s)).collect();
    Ok(CorrelationSeries::from_shards(*cfg, &shards))
}

/// Lags used for a decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWindow {
    /// Lags 1..=5.
    Early,
    /// The last 8 usable lags.
    Tail,
    /// Lags `lo..=hi`.
    Range(usize, usize),
}

/// Exponential decay rate fitted to `ln|C(n)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// `α = −slope`
    pub rate: f64,
    pub intercept: f64,
    /// Lags entering the fit.
    pub lags: Vec<usize>,
    /// Root mean square residual of the log fit.
    pub residual: f64,
}

impl DecayFit {
    pub fn window(&self) -> (usize, usize) {
        (self.lags[0], self.lags[self.lags.len() - 1])
    }
}

pub const EARLY_WINDOW: (usize, usize) = (1, 5);
pub const TAIL_LAGS: usize = 8;

/// Least-squares fit of `ln|C(n)|` against `n` over the usable lags of a
/// window.
pub fn fit_decay(series: &CorrelationSeries, window: FitWindow) -> Result<DecayFit> {
    let usable = series.usable_lags();
    let lags: Vec<usize> = match window {
        FitWindow::Early => usable.into_iter().filter(|&n| n >= EARLY_WINDOW.0 && n <= EARLY_WINDOW.1).collect(),
        FitWindow::Range(lo, hi) => usable.into_iter().filter(|&n| n >= lo && n <= hi).collect(),
        FitWindow::Tail => {
            let skip = usable.len().saturating_sub(TAIL_LAGS);
            usable[skip..].to_vec()
        }
    };
    if lags.len() < MIN_FIT_LAGS {
        return Err(Error::WindowTooNoisy { usable: lags.len() });
    }
    let xs: Vec<f64> = lags.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = lags.iter().map(|&n| num::ln(series.c[n].abs())).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = num::sqrt(
        xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x) * (y - intercept - slope * x)).sum::<f64>() / k,
    );
    Ok(DecayFit { rate: -slope, intercept, lags, residual })
}

/// Orbit average of `ln|f′|` with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitLyapunov {
    pub value: f64,
    pub stderr: f64,
    pub steps: usize,
}

/// Number of batches for the orbit standard error.
pub const LYAPUNOV_BATCHES: usize = 32;

/// `(1/N) Σ ln|f′(x_i)|` along the orbit of `x0`.
pub fn lyapunov_orbit<M: IntervalMap + ?Sized>(map: &M, x0: f64, steps: usize) -> Result<OrbitLyapunov> {
    if steps < 1000 {
        return Err(Error::InvalidArgument("orbit Lyapunov estimate needs N >= 1000"));
    }
    let dom = map.state_space();
    if !dom.contains(x0) {
        return Err(Error::OutOfDomain { x: x0 });
    }
    let mut x = x0;
    let batch = steps / LYAPUNOV_BATCHES;
    let mut batch_means = Vec::with_capacity(LYAPUNOV_BATCHES);
    let mut total = 0.0;
    let mut current = 0.0;
    for i in 0..steps {
        let (y, d) = advance(map, dom, x);
        let l = num::ln(d.abs());
        if !l.is_finite() {
            return Err(Error::DerivativeUndefined { x });
        }
        total += l;
        current += l;
        if (i + 1) % batch == 0 && batch_means.len() < LYAPUNOV_BATCHES {
            batch_means.push(current / batch as f64);
            current = 0.0;
        }
        x = y;
    }
    let value = total / steps as f64;
    let k = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / k;
    let var = batch_means.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (k - 1.0);
    Ok(OrbitLyapunov { value, stderr: num::sqrt(var / k), steps })
}
