//! Check lists behind the `verify` command.
//!
//! Piecewise linear maps get the full bound chain plus the pressure
//! properties. For the smooth family the collocation spectrum is checked
//! for a unit leading eigenvalue and the inf-derivative rates against the
//! Lyapunov exponent; a mixing rate above `2Λ` is expected there (the
//! observables are analytic, not piecewise polynomial) and is reported as
//! such instead of as a failure.

use dynspec_core::chebyshev::{self, essential_radius_bound, lyapunov_smooth};
use dynspec_core::spectral::{self, Check, BOUND_TOL, CONVEXITY_TOL, DERIVATIVE_TOL, PRESSURE_AT_ONE_TOL};
use dynspec_core::{PiecewiseLinearMarkovMap, Result, SmoothFullBranchMap};
use serde::Serialize;

use crate::output::{num, Table};

/// `|ν₀ − 1|` allowed for the collocation operator at `β = 1`.
pub const LEADING_TOL: f64 = 1e-8;
/// Slack in `s_k ≤ Λ`.
pub const BV_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    /// The inequality fails, as it must for this kind of map.
    ExpectedViolation,
}

impl From<Check> for Status {
    fn from(c: Check) -> Self {
        match c {
            Check::Pass => Status::Pass,
            Check::Fail => Status::Fail,
            Check::NotApplicable => Status::NotApplicable,
        }
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// One check: `value` compared against `limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub map: &'static str,
    pub passed: bool,
    pub failures: Vec<String>,
    pub checks: Vec<CheckLine>,
}

impl VerifyReport {
    fn new(map: &'static str, checks: Vec<CheckLine>) -> Self {
        let failures: Vec<String> =
            checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.clone()).collect();
        VerifyReport { map, passed: failures.is_empty(), failures, checks }
    }

    pub fn check(&self, name: &str) -> Option<&CheckLine> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new("check,status,value,limit");
        for c in &self.checks {
            let s = serde_json::to_value(c.status).expect("status serializes");
            t.row([c.name.as_str(), s.as_str().unwrap_or(""), &num(c.value), &num(c.limit)]);
        }
        t
    }
}

fn line(name: &str, status: Status, value: f64, limit: f64) -> CheckLine {
    CheckLine { name: name.to_string(), status, value, limit }
}

/// Default β grid for the pressure checks.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=16).map(|i| i as f64 * 0.25).collect()
}

pub fn verify_linear(map: &PiecewiseLinearMarkovMap, degree: usize, betas: &[f64]) -> Result<VerifyReport> {
    let v = spectral::verify_bounds(map, degree)?;
    let p = spectral::verify_pressure_properties(map, betas)?;
    let two_l = 2.0 * v.lambda_exp;
    let checks = vec![
        line("bound_2L", v.bound_2l.into(), v.alpha, two_l),
        line("bound_1L", v.bound_1l.into(), v.alpha, v.minus_p2.map_or(f64::NAN, |_| v.lambda_exp)),
        line("jensen_chain", v.jensen_chain.into(), v.minus_ln_nu2, v.minus_p3),
        line("nu_identity", v.nu_identity_check.into(), v.nu_identity, 0.0),
        line("block_bound", v.block_bound_check.into(), v.block_bound, BOUND_TOL),
        line("pressure_at_one", status(p.p_at_one_ok), p.p_at_one, PRESSURE_AT_ONE_TOL),
        line("convexity", status(p.convex), p.convexity_violation, CONVEXITY_TOL),
        line("monotone_decrease", status(p.strictly_decreasing), p.values[p.values.len() - 1], p.values[0]),
        line("derivative_vs_lyapunov", status(p.derivative_ok), p.derivative_gap, DERIVATIVE_TOL),
    ];
    Ok(VerifyReport::new("piecewise_linear", checks))
}

pub fn verify_smooth(map: &SmoothFullBranchMap, order: usize, k_max: usize) -> Result<VerifyReport> {
    let spec = chebyshev::spectrum(map, 1.0, order)?;
    let lyap = lyapunov_smooth(map, order)?;
    let mut checks = Vec::new();
    let gap = spec.leading.sub(dynspec_core::Complex::real(1.0)).norm();
    checks.push(line("leading_eigenvalue", status(gap <= LEADING_TOL), gap, LEADING_TOL));
    let rate = spec.mixing_rate;
    let s2l = if rate > 2.0 * lyap { Status::ExpectedViolation } else { Status::Pass };
    checks.push(line("bound_2L", s2l, rate, 2.0 * lyap));
    let r = essential_radius_bound(map, k_max)?;
    for (k, s) in r.s.iter().enumerate() {
        checks.push(line(&format!("bv_rate_k{}", k + 1), status(*s <= lyap + BV_TOL), *s, lyap));
    }
    Ok(VerifyReport::new("moebius", checks))
}
