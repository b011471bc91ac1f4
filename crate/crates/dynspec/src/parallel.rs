//! Rayon drivers for the embarrassingly parallel parts: ensemble shards and
//! parameter sweeps. Results are collected in index order and reduced
//! serially, so they are bit-identical to the serial routines for any
//! thread count.

use dynspec_core::chebyshev::{self, SweepRow};
use dynspec_core::correlation::{simulate_shard, CorrelationSeries, EnsembleConfig, Observable, ShardSums};
use dynspec_core::{IntervalMap, Result};
use rayon::prelude::*;

use crate::CliError;

pub const THREADS_ENV: &str = "DYN_SPEC_THREADS";

/// Worker count from the command line, falling back to `DYN_SPEC_THREADS`.
/// `None` leaves the choice to rayon.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::config(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` inside a pool of `threads` workers (0 or `None`: rayon default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// [`dynspec_core::correlation::simulate`] with shards spread over the
/// current pool.
pub fn simulate<M: IntervalMap + Sync + ?Sized>(
    map: &M,
    phi: &Observable,
    psi: &Observable,
    cfg: &EnsembleConfig,
) -> Result<CorrelationSeries> {
    cfg.check()?;
    phi.check_domain(map.state_space())?;
    psi.check_domain(map.state_space())?;
    let shards: Vec<ShardSums> =
        (0..cfg.shards).into_par_iter().map(|s| simulate_shard(map, phi, psi, cfg, s)).collect();
    Ok(CorrelationSeries::from_shards(*cfg, &shards))
}

/// [`chebyshev::spectrum_vs_parameter`] over the current pool.
pub fn sweep(c_grid: &[f64], beta: f64, order: usize, count: usize) -> Result<Vec<SweepRow>> {
    let per_c: Vec<Vec<SweepRow>> =
        c_grid.par_iter().map(|&c| chebyshev::sweep_point(c, beta, order, count)).collect::<Result<_>>()?;
    Ok(per_c.into_iter().flatten().collect())
}

/// `lo, lo+step, …` up to `hi` inclusive, each value rounded to 12 decimals
/// so that grid points print cleanly.
pub fn parameter_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::config("grid needs finite lo <= hi and step > 0"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}
