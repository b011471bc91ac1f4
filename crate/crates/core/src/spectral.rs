//! Pressure, Lyapunov exponents, mixing rates and the bounds tying them
//! together for piecewise linear Markov maps.
//!
//! The nonzero spectrum of `L_β` on piecewise analytic functions is the
//! union of the spectra of the diagonal blocks `T^(mm)(β)`. The pressure is
//! `P(β) = ln ν₀(β)` with `ν₀` the Perron root of `T^(00)(β)`, and the
//! identity `T^(22)(β) = T^(00)(β+2)` turns convexity of `P` into the chain
//! `α ≤ −ln ν₂(1) = −P(3) ≤ 2Λ`.

use alloc::vec::Vec;

use crate::eigen::{self, compare_descending};
use crate::linalg::Complex;
use crate::map_model::PiecewiseLinearMarkovMap;
use crate::num;
use crate::transfer_matrix::{assemble, block, PiecewisePolynomial};
use crate::{Error, Result};

pub use crate::eigen::{eigenvalues, perron};

/// Default central-difference step for `P′(β)`.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-4;

/// Relative slack used when checking inequalities that can be tight.
pub const BOUND_TOL: f64 = 1e-10;

/// β values at which the block-domination bound is checked.
pub const BLOCK_BOUND_BETAS: [f64; 3] = [0.5, 1.0, 2.0];

/// β values at which the diagonal block identities are checked.
pub const IDENTITY_BETAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn require_mixing(map: &PiecewiseLinearMarkovMap) -> Result<()> {
    if map.is_mixing() {
        Ok(())
    } else {
        Err(Error::NotMixing)
    }
}

/// Perron root `ν₀(β)` of `T^(00)(β)`.
pub fn leading_eigenvalue(map: &PiecewiseLinearMarkovMap, beta: f64) -> Result<f64> {
    require_mixing(map)?;
    Ok(perron(&block(map, beta, 0, 0)?)?.0)
}

/// Topological pressure `P(β) = ln ν₀(β)`.
pub fn pressure(map: &PiecewiseLinearMarkovMap, beta: f64) -> Result<f64> {
    Ok(num::ln(leading_eigenvalue(map, beta)?))
}

/// Central difference `(P(β+h) − P(β−h)) / 2h`.
pub fn pressure_derivative(map: &PiecewiseLinearMarkovMap, beta: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("derivative step must be positive"));
    }
    Ok((pressure(map, beta + step)? - pressure(map, beta - step)?) / (2.0 * step))
}

/// Piecewise constant invariant density, normalized to unit integral.
pub fn invariant_density(map: &PiecewiseLinearMarkovMap) -> Result<PiecewisePolynomial> {
    require_mixing(map)?;
    let (_, u) = perron(&block(map, 1.0, 0, 0)?)?;
    let mass: f64 = u.iter().enumerate().map(|(k, v)| v * map.element(k).len()).sum();
    let values: Vec<f64> = u.iter().map(|v| v / mass).collect();
    PiecewisePolynomial::constant(map.breakpoints().to_vec(), &values)
}

/// `Λ = Σ_k μ(I_k) ln|γ_k|` with `μ(I_k) = h_k |I_k|`.
pub fn lyapunov_exact(map: &PiecewiseLinearMarkovMap) -> Result<f64> {
    let h = invariant_density(map)?;
    Ok((0..map.len())
        .map(|k| h.coeff(k, 0) * map.element(k).len() * num::ln(map.slopes()[k].abs()))
        .sum())
}

/// An eigenvalue together with the diagonal block it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenvalue {
    pub value: Complex,
    pub block: usize,
}

/// Eigenvalues of `T^(mm)(β)` for `m = 0..=degree`, sorted by descending
/// modulus.
pub fn diagonal_spectrum(map: &PiecewiseLinearMarkovMap, beta: f64, degree: usize) -> Result<Vec<BlockEigenvalue>> {
    let mut out = Vec::new();
    for m in 0..=degree {
        for value in eigenvalues(&block(map, beta, m, m)?)? {
            out.push(BlockEigenvalue { value, block: m });
        }
    }
    out.sort_by(|a, b| compare_descending(a.value, b.value).then(a.block.cmp(&b.block)));
    Ok(out)
}

/// Spectral summary of the Perron–Frobenius operator (`β = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub beta: f64,
    pub degree: usize,
    /// `ν₀(1)`, equal to one for every valid mixing map.
    pub leading: f64,
    /// Largest eigenvalue in modulus once one copy of the leading
    /// eigenvalue is removed.
    pub subleading: BlockEigenvalue,
    /// How many eigenvalues share the modulus of `subleading`.
    pub subleading_multiplicity: usize,
    pub spectrum: Vec<BlockEigenvalue>,
    pub pressure: f64,
    pub lyapunov: f64,
    /// `α_H = −ln|λ₁|`.
    pub mixing_rate: f64,
    pub invariant_density: PiecewisePolynomial,
}

/// Spectrum up to degree `M ≥ 2` and the resulting mixing rate.
pub fn mixing_rate(map: &PiecewiseLinearMarkovMap, degree: usize) -> Result<SpectralReport> {
    if degree < 2 {
        return Err(Error::InvalidArgument("mixing rate needs degree M >= 2"));
    }
    require_mixing(map)?;
    let leading = leading_eigenvalue(map, 1.0)?;
    let spectrum = diagonal_spectrum(map, 1.0, degree)?;
    let drop = spectrum
        .iter()
        .enumerate()
        .filter(|(_, e)| e.block == 0)
        .min_by(|(_, a), (_, b)| {
            a.value.sub(Complex::real(leading)).norm().total_cmp(&b.value.sub(Complex::real(leading)).norm())
        })
        .map(|(i, _)| i)
        .expect("block 0 is nonempty");
    let rest: Vec<&BlockEigenvalue> = spectrum.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, e)| e).collect();
    let subleading = rest
        .first()
        .map(|e| **e)
        .unwrap_or(BlockEigenvalue { value: Complex::real(0.0), block: 0 });
    let modulus = subleading.value.norm();
    let subleading_multiplicity = rest
        .iter()
        .filter(|e| (e.value.norm() - modulus).abs() <= BOUND_TOL * modulus.max(1e-300))
        .count()
        .max(1);
    let density = invariant_density(map)?;
    Ok(SpectralReport {
        beta: 1.0,
        degree,
        leading,
        subleading,
        subleading_multiplicity,
        spectrum,
        pressure: num::ln(leading),
        lyapunov: lyapunov_exact(map)?,
        mixing_rate: -num::ln(modulus),
        invariant_density: density,
    })
}

/// Result of a single inequality or identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail,
    NotApplicable,
}

impl Check {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Check::Fail
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUND_TOL * a.abs().max(b.abs()).max(1.0)
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUND_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Every bound relating the mixing rate to the Lyapunov exponent, plus the
/// structural identities they rest on.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsVerdict {
    pub alpha: f64,
    pub lambda_exp: f64,
    /// `−ln ν₂(1)` from the Perron root of `T^(22)(1)`.
    pub minus_ln_nu2: f64,
    /// `−P(3)` from the Perron root of `T^(00)(3)`.
    pub minus_p3: f64,
    /// `−ln|ν₁(1)|` from the spectral radius of `T^(11)(1)` (common slope sign only).
    pub minus_ln_nu1: Option<f64>,
    /// `−P(2)` (common slope sign only).
    pub minus_p2: Option<f64>,
    /// `α ≤ 2Λ`
    pub bound_2l: Check,
    /// `α ≤ −ln|ν₁(1)| = −P(2) ≤ Λ` when all slopes share a sign.
    pub bound_1l: Check,
    /// `α ≤ −ln ν₂(1) = −P(3) ≤ 2Λ`
    pub jensen_chain: Check,
    /// Largest entrywise `|T^(22)(β) − T^(00)(β+2)|` (and the same-sign
    /// `T^(11)` identity) over [`IDENTITY_BETAS`].
    pub nu_identity: f64,
    pub nu_identity_check: Check,
    /// `max_{β, m≥1} r(T^(mm)(β)) − ν₀(β)/min|γ|`, over [`BLOCK_BOUND_BETAS`].
    pub block_bound: f64,
    pub block_bound_check: Check,
}

impl BoundsVerdict {
    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, check) in [
            ("bound_2L", self.bound_2l),
            ("bound_1L", self.bound_1l),
            ("jensen_chain", self.jensen_chain),
            ("nu_identity", self.nu_identity_check),
            ("block_bound", self.block_bound_check),
        ] {
            if check.is_fail() {
                out.push(name);
            }
        }
        out
    }
}

/// Evaluates the bound chains for a mixing map using blocks up to `M ≥ 2`.
pub fn verify_bounds(map: &PiecewiseLinearMarkovMap, degree: usize) -> Result<BoundsVerdict> {
    let report = mixing_rate(map, degree)?;
    let alpha = report.mixing_rate;
    let lambda_exp = report.lyapunov;

    let minus_ln_nu2 = -num::ln(perron(&block(map, 1.0, 2, 2)?)?.0);
    let minus_p3 = -pressure(map, 3.0)?;
    let jensen_chain = Check::from_bool(
        le(alpha, minus_ln_nu2) && approx_eq(minus_ln_nu2, minus_p3) && le(minus_p3, 2.0 * lambda_exp),
    );
    let bound_2l = Check::from_bool(le(alpha, 2.0 * lambda_exp));

    let sign = map.common_slope_sign();
    let (minus_ln_nu1, minus_p2, bound_1l) = match sign {
        Some(_) => {
            let nu1 = eigen::spectral_radius(&block(map, 1.0, 1, 1)?)?;
            let a = -num::ln(nu1);
            let b = -pressure(map, 2.0)?;
            let ok = le(alpha, a) && approx_eq(a, b) && le(b, lambda_exp);
            (Some(a), Some(b), Check::from_bool(ok))
        }
        None => (None, None, Check::NotApplicable),
    };

    let mut nu_identity: f64 = 0.0;
    let mut identity_ok = true;
    for beta in IDENTITY_BETAS {
        let mut pairs = alloc::vec![(block(map, beta, 2, 2)?, block(map, beta + 2.0, 0, 0)?, 1.0)];
        if let Some(s) = sign {
            pairs.push((block(map, beta, 1, 1)?, block(map, beta + 1.0, 0, 0)?, s));
        }
        for (lhs, rhs, s) in pairs {
            for (a, b) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                let d = (a - s * b).abs();
                nu_identity = nu_identity.max(d);
                identity_ok &= d <= f64::EPSILON * a.abs().max(b.abs());
            }
        }
    }

    let c = 1.0 / map.min_abs_slope();
    let mut block_bound = f64::NEG_INFINITY;
    let mut block_ok = true;
    for beta in BLOCK_BOUND_BETAS {
        let nu0 = leading_eigenvalue(map, beta)?;
        for m in 1..=degree {
            let r = eigen::spectral_radius(&block(map, beta, m, m)?)?;
            let excess = r - c * nu0;
            block_bound = block_bound.max(excess);
            block_ok &= excess <= BOUND_TOL * nu0;
        }
    }

    Ok(BoundsVerdict {
        alpha,
        lambda_exp,
        minus_ln_nu2,
        minus_p3,
        minus_ln_nu1,
        minus_p2,
        bound_2l,
        bound_1l,
        jensen_chain,
        nu_identity,
        nu_identity_check: Check::from_bool(identity_ok),
        block_bound,
        block_bound_check: Check::from_bool(block_ok),
    })
}

/// Tolerances for [`verify_pressure_properties`].
pub const PRESSURE_AT_ONE_TOL: f64 = 1e-10;
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const DERIVATIVE_TOL: f64 = 1e-6;

/// Numerical checks of the standard pressure properties on a β grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub p_at_one: f64,
    pub p_at_one_ok: bool,
    /// Largest violation of `P(β_j) ≤` chord over all grid triples.
    pub convexity_violation: f64,
    pub convex: bool,
    pub strictly_decreasing: bool,
    pub derivative_at_one: f64,
    pub lyapunov: f64,
    /// `|P′(1) + Λ|`
    pub derivative_gap: f64,
    pub derivative_ok: bool,
}

impl PressureReport {
    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.p_at_one_ok {
            out.push("pressure_at_one");
        }
        if !self.convex {
            out.push("convexity");
        }
        if !self.strictly_decreasing {
            out.push("monotone_decrease");
        }
        if !self.derivative_ok {
            out.push("derivative_vs_lyapunov");
        }
        out
    }
}

/// Checks `P(1) = 0`, convexity over all grid triples, strict decrease and
/// `P′(1) = −Λ` for a grid inside `[0, 4]`.
pub fn verify_pressure_properties(map: &PiecewiseLinearMarkovMap, beta_grid: &[f64]) -> Result<PressureReport> {
    if beta_grid.iter().any(|b| !(0.0..=4.0).contains(b)) {
        return Err(Error::InvalidArgument("beta grid must lie in [0, 4]"));
    }
    let mut grid = beta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let values: Vec<f64> = grid.iter().map(|&b| pressure(map, b)).collect::<Result<_>>()?;

    let mut violation: f64 = 0.0;
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            for k in j + 1..grid.len() {
                let t = (grid[j] - grid[i]) / (grid[k] - grid[i]);
                let chord = (1.0 - t) * values[i] + t * values[k];
                violation = violation.max(values[j] - chord);
            }
        }
    }
    let strictly_decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let p_at_one = pressure(map, 1.0)?;
    let derivative_at_one = pressure_derivative(map, 1.0, DEFAULT_DERIVATIVE_STEP)?;
    let lyapunov = lyapunov_exact(map)?;
    let derivative_gap = (derivative_at_one + lyapunov).abs();
    Ok(PressureReport {
        grid,
        values,
        p_at_one,
        p_at_one_ok: p_at_one.abs() <= PRESSURE_AT_ONE_TOL,
        convexity_violation: violation,
        convex: violation <= CONVEXITY_TOL,
        strictly_decreasing,
        derivative_at_one,
        lyapunov,
        derivative_gap,
        derivative_ok: derivative_gap <= DERIVATIVE_TOL,
    })
}

/// Nonzero part of the spectrum of the full block matrix of degree `M`.
pub fn full_matrix_spectrum(map: &PiecewiseLinearMarkovMap, beta: f64, degree: usize) -> Result<Vec<Complex>> {
    eigenvalues(&assemble(map, beta, degree)?.dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = core::f64::consts::LN_2;

    fn golden_nu0(beta: f64) -> f64 {
        // Perron root of [[a, b], [a, 0]] with a = (2/3)^β, b = (1/2)^β.
        let a = libm::pow(2.0 / 3.0, beta);
        let b = libm::pow(0.5, beta);
        (a + libm::sqrt(a * a + 4.0 * a * b)) / 2.0
    }

    #[test]
    fn golden_closed_forms() {
        assert!((golden_nu0(2.0) - 0.62284).abs() < 1e-5);
        assert!((golden_nu0(3.0) - 0.391016).abs() < 1e-6);
    }

    #[test]
    fn pressure_examples() {
        let doubling = PiecewiseLinearMarkovMap::doubling();
        assert!((pressure(&doubling, 3.0).unwrap() + 2.0 * LN2).abs() < 1e-13);
        for map in [PiecewiseLinearMarkovMap::tent(), doubling.clone(), PiecewiseLinearMarkovMap::golden()] {
            assert!(pressure(&map, 1.0).unwrap().abs() < 1e-10);
        }
        let golden = PiecewiseLinearMarkovMap::golden();
        let p3 = pressure(&golden, 3.0).unwrap();
        assert!((p3 - libm::log(golden_nu0(3.0))).abs() < 1e-12);
    }

    #[test]
    fn pressure_derivative_examples() {
        let doubling = PiecewiseLinearMarkovMap::doubling();
        assert!((pressure_derivative(&doubling, 1.0, 1e-4).unwrap() + LN2).abs() < 1e-9);
        let tent = PiecewiseLinearMarkovMap::tent();
        assert!((pressure_derivative(&tent, 1.0, 1e-4).unwrap() + LN2).abs() < 1e-8);
        let golden = PiecewiseLinearMarkovMap::golden();
        assert!((pressure_derivative(&golden, 1.0, 1e-4).unwrap() + 0.477386).abs() < 1e-6);
        assert!(pressure_derivative(&golden, 1.0, 0.0).is_err());
    }

    #[test]
    fn densities_and_lyapunov() {
        let tent = PiecewiseLinearMarkovMap::tent();
        let h = invariant_density(&tent).unwrap();
        assert!((h.coeff(0, 0) - 1.0).abs() < 1e-13 && (h.coeff(1, 0) - 1.0).abs() < 1e-13);
        assert!((lyapunov_exact(&tent).unwrap() - LN2).abs() < 1e-14);
        assert!((lyapunov_exact(&PiecewiseLinearMarkovMap::doubling()).unwrap() - LN2).abs() < 1e-14);

        let golden = PiecewiseLinearMarkovMap::golden();
        let h = invariant_density(&golden).unwrap();
        assert!((h.coeff(0, 0) - 9.0 / 8.0).abs() < 1e-12);
        assert!((h.coeff(1, 0) - 0.75).abs() < 1e-12);
        let want = 0.75 * libm::log(1.5) + 0.25 * LN2;
        assert!((lyapunov_exact(&golden).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.477386).abs() < 1e-6);
    }

    #[test]
    fn mixing_rate_examples() {
        let tent = mixing_rate(&PiecewiseLinearMarkovMap::tent(), 2).unwrap();
        assert!((tent.subleading.value.re - 0.25).abs() < 1e-12);
        assert_eq!(tent.subleading.block, 2);
        assert!((tent.mixing_rate - 2.0 * tent.lyapunov).abs() < 1e-12);

        let doubling = mixing_rate(&PiecewiseLinearMarkovMap::doubling(), 2).unwrap();
        assert!((doubling.subleading.value.re - 0.5).abs() < 1e-12);
        assert!((doubling.mixing_rate - LN2).abs() < 1e-12);

        let golden = mixing_rate(&PiecewiseLinearMarkovMap::golden(), 2).unwrap();
        assert!((golden.subleading.value.re - golden_nu0(2.0)).abs() < 1e-12);
        assert_eq!(golden.subleading.block, 1);
        assert!((golden.mixing_rate + libm::log(golden_nu0(2.0))).abs() < 1e-12);
        assert!(golden.mixing_rate <= golden.lyapunov);
        assert!((golden.leading - 1.0).abs() < 1e-10);
        assert!(mixing_rate(&PiecewiseLinearMarkovMap::golden(), 1).is_err());
    }

    #[test]
    fn verify_bounds_examples() {
        let tent = verify_bounds(&PiecewiseLinearMarkovMap::tent(), 4).unwrap();
        assert!(tent.all_pass(), "{tent:?}");
        assert!((tent.minus_p3 - 2.0 * LN2).abs() < 1e-12);
        assert!((tent.minus_p3 - 2.0 * tent.lambda_exp).abs() < 1e-12);
        assert_eq!(tent.bound_1l, Check::NotApplicable);
        assert_eq!(tent.nu_identity, 0.0);

        let golden = verify_bounds(&PiecewiseLinearMarkovMap::golden(), 2).unwrap();
        assert!(golden.all_pass(), "{golden:?}");
        assert_eq!(golden.bound_1l, Check::Pass);
    }

    #[test]
    fn pressure_properties_examples() {
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();
        for map in [
            PiecewiseLinearMarkovMap::doubling(),
            PiecewiseLinearMarkovMap::tent(),
            PiecewiseLinearMarkovMap::golden(),
        ] {
            let r = verify_pressure_properties(&map, &grid).unwrap();
            assert!(r.all_pass(), "{r:?}");
        }
        let doubling = verify_pressure_properties(&PiecewiseLinearMarkovMap::doubling(), &grid).unwrap();
        for (b, p) in doubling.grid.iter().zip(&doubling.values) {
            assert!((p - (1.0 - b) * LN2).abs() < 1e-12);
        }
        assert!(verify_pressure_properties(&PiecewiseLinearMarkovMap::tent(), &[5.0]).is_err());
    }

    #[test]
    fn non_mixing_map_is_rejected() {
        // Each half maps onto the other one.
        let swap = PiecewiseLinearMarkovMap::new(
            alloc::vec![0.0, 0.25, 0.5, 0.75, 1.0],
            alloc::vec![(2.0, 0.5), (2.0, 0.0), (2.0, -1.0), (2.0, -1.5)],
        )
        .unwrap();
        assert!(!swap.is_mixing());
        assert_eq!(pressure(&swap, 1.0), Err(Error::NotMixing));
    }
}
