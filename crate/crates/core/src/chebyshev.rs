//! Lagrange–Chebyshev collocation of `L_β` for analytic full-branch maps.
//!
//! Functions are represented by their values at `n` Chebyshev points of the
//! first kind. The matrix has entries
//! `Σ_b |φ_b′(x_i)|^β ℓ_j(φ_b(x_i))`, with `φ_b` the inverse branches and
//! `ℓ_j` the Lagrange cardinal polynomials, evaluated in barycentric form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigen::eigenvalues;
use crate::linalg::{Complex, Matrix};
use crate::map_model::{FullBranchMap, Interval, SmoothFullBranchMap};
use crate::quadrature::{chebyshev_points, fejer_weights, integrate};
use crate::{num, Error, Result};

/// Smallest supported collocation order.
pub const MIN_ORDER: usize = 4;

/// Gauss–Legendre points per branch domain for Lyapunov exponents.
pub const LYAPUNOV_QUADRATURE_POINTS: usize = 64;

/// Total grid points per composition length in [`essential_radius_bound`].
pub const ESSENTIAL_GRID_POINTS: usize = 1 << 14;

/// Minimum grid points per inverse-branch word.
pub const ESSENTIAL_MIN_POINTS_PER_WORD: usize = 33;

const POWER_TOLERANCE: f64 = 1e-14;
const POWER_MAX_ITERATIONS: usize = 10_000;

/// Chebyshev points on an interval with their barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    domain: Interval,
    nodes: Vec<f64>,
    bary: Vec<f64>,
    quad: Vec<f64>,
}

impl ChebyshevGrid {
    pub fn new(domain: Interval, n: usize) -> Self {
        let half = 0.5 * domain.len();
        let nodes = chebyshev_points(n).into_iter().map(|t| domain.midpoint() + half * t).collect();
        let bary = (0..n)
            .map(|j| {
                let s = num::sin((2 * j + 1) as f64 * PI / (2 * n) as f64);
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let quad = fejer_weights(n).into_iter().map(|w| w * half).collect();
        ChebyshevGrid { domain, nodes, bary, quad }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights on the domain (Fejér's first rule).
    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad
    }

    /// `ℓ_j(y)` for all `j`.
    pub fn cardinals(&self, y: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&x| x == y) {
            let mut out = alloc::vec![0.0; self.len()];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = self.nodes.iter().zip(&self.bary).map(|(x, w)| w / (y - x)).collect();
        let total: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / total).collect()
    }

    /// Value at `y` of the interpolant through `values`.
    pub fn interpolate(&self, values: &[f64], y: f64) -> f64 {
        let mut num_ = 0.0;
        let mut den = 0.0;
        for ((x, w), v) in self.nodes.iter().zip(&self.bary).zip(values) {
            if *x == y {
                return *v;
            }
            let t = w / (y - x);
            num_ += t * v;
            den += t;
        }
        num_ / den
    }

    /// Integral of the interpolant through `values`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.quad.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Collocation matrix of `L_β` on a Chebyshev grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevOperator {
    beta: f64,
    grid: ChebyshevGrid,
    matrix: Matrix,
}

impl ChebyshevOperator {
    pub fn order(&self) -> usize {
        self.grid.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn grid(&self) -> &ChebyshevGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Applies the operator to a vector of node values.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(values)
    }

    /// Eigenvalues sorted by descending modulus.
    pub fn eigenvalues(&self) -> Result<Vec<Complex>> {
        eigenvalues(&self.matrix)
    }
}

/// Row `i` of the collocation matrix.
fn operator_row<F: FullBranchMap + ?Sized>(map: &F, grid: &ChebyshevGrid, beta: f64, i: usize) -> Result<Vec<f64>> {
    let n = grid.len();
    let x = grid.nodes()[i];
    let mut row = alloc::vec![0.0; n];
    for b in 0..map.branch_count() {
        let y = map.inverse_branch(b, x)?;
        let d = map.inverse_derivative(b, x)?;
        if !(y.is_finite() && d.is_finite()) {
            return Err(Error::InverseBranchFailure { branch: b, y: x });
        }
        let weight = num::powf(d.abs(), beta);
        for (r, l) in row.iter_mut().zip(grid.cardinals(y)) {
            *r += weight * l;
        }
    }
    Ok(row)
}

/// Builds the order-`n` collocation matrix of `L_β`.
pub fn build<F: FullBranchMap + ?Sized>(map: &F, beta: f64, n: usize) -> Result<ChebyshevOperator> {
    if n < MIN_ORDER {
        return Err(Error::InvalidArgument("Chebyshev order must be at least 4"));
    }
    let grid = ChebyshevGrid::new(map.domain(), n);
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        data.extend(operator_row(map, &grid, beta, i)?);
    }
    Ok(ChebyshevOperator { beta, grid, matrix: Matrix::from_row_major(n, n, data) })
}

/// Leading part of the collocation spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSpectrum {
    pub order: usize,
    pub beta: f64,
    /// All eigenvalues, descending modulus.
    pub eigenvalues: Vec<Complex>,
    pub leading: Complex,
    pub subleading: Complex,
    /// `−ln|λ₁|`
    pub mixing_rate: f64,
}

pub fn spectrum<F: FullBranchMap + ?Sized>(map: &F, beta: f64, n: usize) -> Result<ChebyshevSpectrum> {
    let eigenvalues = build(map, beta, n)?.eigenvalues()?;
    let leading = eigenvalues[0];
    let subleading = eigenvalues[1];
    Ok(ChebyshevSpectrum {
        order: n,
        beta,
        leading,
        subleading,
        mixing_rate: -num::ln(subleading.norm()),
        eigenvalues,
    })
}

/// One eigenvalue of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    /// 0 for the leading eigenvalue.
    pub rank: usize,
    pub value: Complex,
    pub modulus: f64,
    /// `Some(±1.0)` for real eigenvalues.
    pub sign: Option<f64>,
}

/// Leading `count` eigenvalues of the Möbius map `F_c` at order `n`.
pub fn sweep_point(c: f64, beta: f64, n: usize, count: usize) -> Result<Vec<SweepRow>> {
    let map = SmoothFullBranchMap::moebius(c)?;
    let eig = build(&map, beta, n)?.eigenvalues()?;
    Ok(eig
        .into_iter()
        .take(count)
        .enumerate()
        .map(|(rank, value)| SweepRow {
            c,
            rank,
            value,
            modulus: value.norm(),
            sign: value.is_real().then(|| if value.re < 0.0 { -1.0 } else { 1.0 }),
        })
        .collect())
}

/// [`sweep_point`] for every `c` of the grid, in grid order.
pub fn spectrum_vs_parameter(c_grid: &[f64], beta: f64, n: usize, count: usize) -> Result<Vec<SweepRow>> {
    let mut out = Vec::new();
    for &c in c_grid {
        out.extend(sweep_point(c, beta, n, count)?);
    }
    Ok(out)
}

/// The `c` minimizing `|λ₁|` (rank 1) in a sweep table.
pub fn argmin_subleading(rows: &[SweepRow]) -> Option<(f64, f64)> {
    rows.iter()
        .filter(|r| r.rank == 1)
        .min_by(|a, b| a.modulus.total_cmp(&b.modulus))
        .map(|r| (r.c, r.modulus))
}

/// Invariant density as an interpolant on the Chebyshev grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityInterpolant {
    grid: ChebyshevGrid,
    values: Vec<f64>,
    normalization: f64,
    residual: f64,
}

impl DensityInterpolant {
    pub fn grid(&self) -> &ChebyshevGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    /// Density values at the nodes.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Factor that scaled the raw fixed point to unit integral.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `‖Lh − h‖∞ / ‖h‖∞` at the nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }
}

/// Fixed point of the `β = 1` collocation operator, normalized to unit
/// integral.
pub fn invariant_density_smooth<F: FullBranchMap + ?Sized>(map: &F, n: usize) -> Result<DensityInterpolant> {
    let op = build(map, 1.0, n)?;
    density_of(&op)
}

pub fn density_of(op: &ChebyshevOperator) -> Result<DensityInterpolant> {
    let grid = op.grid().clone();
    let mut v = alloc::vec![1.0 / grid.domain().len(); grid.len()];
    for it in 0..POWER_MAX_ITERATIONS {
        let w = op.apply(&v);
        let mass = grid.integrate(&w);
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NotConverged { iterations: it });
        }
        let w: Vec<f64> = w.into_iter().map(|x| x / mass).collect();
        let change = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        v = w;
        if change <= POWER_TOLERANCE * scale {
            let lv = op.apply(&v);
            let residual = lv.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
            if v.iter().any(|&x| x < 0.0) {
                return Err(Error::NonPositiveVector);
            }
            return Ok(DensityInterpolant { grid, normalization: 1.0 / mass, values: v, residual });
        }
    }
    Err(Error::NotConverged { iterations: POWER_MAX_ITERATIONS })
}

/// `∫ ln|F′| h dx` with Gauss–Legendre quadrature on every branch domain.
pub fn lyapunov_smooth<F: FullBranchMap + ?Sized>(map: &F, n: usize) -> Result<f64> {
    let h = invariant_density_smooth(map, n)?;
    Ok(lyapunov_against(map, &h))
}

pub fn lyapunov_against<F: FullBranchMap + ?Sized>(map: &F, h: &DensityInterpolant) -> f64 {
    (0..map.branch_count())
        .map(|b| {
            integrate(map.branch_domain(b), LYAPUNOV_QUADRATURE_POINTS, |x| {
                num::ln(map.deriv_branch(b, x).abs()) * h.eval(x)
            })
        })
        .sum()
}

/// Growth rates of `inf |(F^k)′|` and the bound they give.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialRadius {
    /// `s_k = (1/k) ln inf |(F^k)′|`, `k = 1..=k_max`.
    pub s: Vec<f64>,
    /// `exp(−s_k)`
    pub sigma: Vec<f64>,
    /// `max_k s_k`
    pub alpha_bv_bound: f64,
}

/// `ln |(φ_w)′(y)|` for the composed inverse branch of a word.
fn log_inverse_derivative<F: FullBranchMap + ?Sized>(map: &F, word: &[usize], y: f64) -> Result<f64> {
    let mut y = y;
    let mut acc = 0.0;
    for &b in word.iter().rev() {
        acc += num::ln(map.inverse_derivative(b, y)?.abs());
        y = map.inverse_branch(b, y)?;
    }
    Ok(acc)
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `g` on `[a, b]`.
fn golden_max(mut a: f64, mut b: f64, g: &mut impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let (mut g1, mut g2) = (g(x1)?, g(x2)?);
    for _ in 0..80 {
        if g1 >= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - INV_GOLDEN * (b - a);
            g1 = g(x1)?;
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + INV_GOLDEN * (b - a);
            g2 = g(x2)?;
        }
    }
    Ok(g1.max(g2))
}

/// `s_k` for `k = 1..=k_max`, from grids over every inverse-branch word of
/// length `k` plus golden-section refinement around each grid minimum of
/// `|(F^k)′|`.
pub fn essential_radius_bound<F: FullBranchMap + ?Sized>(map: &F, k_max: usize) -> Result<EssentialRadius> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1"));
    }
    let b = map.branch_count();
    let dom = map.domain();
    let mut s = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let words = b.checked_pow(k as u32).ok_or(Error::InvalidArgument("too many words"))?;
        let points = (ESSENTIAL_GRID_POINTS / words).max(ESSENTIAL_MIN_POINTS_PER_WORD);
        let mut word = alloc::vec![0usize; k];
        // Largest ln|φ_w′| is the smallest ln|(F^k)′|.
        let mut best = f64::NEG_INFINITY;
        for index in 0..words {
            let mut rest = index;
            for slot in word.iter_mut().rev() {
                *slot = rest % b;
                rest /= b;
            }
            let ys: Vec<f64> = (0..points).map(|i| dom.lerp(i as f64 / (points - 1) as f64)).collect();
            let vals: Vec<f64> =
                ys.iter().map(|&y| log_inverse_derivative(map, &word, y)).collect::<Result<_>>()?;
            for i in 0..points {
                let left = i == 0 || vals[i - 1] <= vals[i];
                let right = i + 1 == points || vals[i + 1] <= vals[i];
                if !(left && right) {
                    continue;
                }
                best = best.max(vals[i]);
                let lo = ys[i.saturating_sub(1)];
                let hi = ys[(i + 1).min(points - 1)];
                let refined = golden_max(lo, hi, &mut |y| log_inverse_derivative(map, &word, y))?;
                best = best.max(refined);
            }
        }
        s.push(-best / k as f64);
    }
    let sigma = s.iter().map(|&v| num::exp(-v)).collect();
    let alpha_bv_bound = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EssentialRadius { s, sigma, alpha_bv_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moebius(c: f64) -> SmoothFullBranchMap {
        SmoothFullBranchMap::moebius(c).unwrap()
    }

    #[test]
    fn interpolation_is_exact_for_polynomials() {
        let grid = ChebyshevGrid::new(Interval::new(-1.0, 1.0).unwrap(), 8);
        let vals: Vec<f64> = grid.nodes().iter().map(|x| x * x * x - 2.0 * x + 0.5).collect();
        for y in [-0.9, -0.3, 0.0, 0.77] {
            assert!((grid.interpolate(&vals, y) - (y * y * y - 2.0 * y + 0.5)).abs() < 1e-13);
        }
        let card = grid.cardinals(0.123);
        assert!((card.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((grid.integrate(&vals) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tent_spectrum() {
        for n in [8, 16, 25] {
            let eig = build(&moebius(0.0), 1.0, n).unwrap().eigenvalues().unwrap();
            assert!((eig[0].re - 1.0).abs() < 1e-8);
            assert!((eig[1].norm() - 0.25).abs() < 1e-8);
            assert!((eig[2].norm() - 0.0625).abs() < 1e-8);
        }
    }

    #[test]
    fn moebius_subleading() {
        let spec = spectrum(&moebius(-0.11), 1.0, 25).unwrap();
        assert!((spec.leading.re - 1.0).abs() < 1e-8);
        assert!((spec.subleading.norm() - 0.104148288).abs() < 1e-6);
        assert!((spec.mixing_rate - 2.261939).abs() < 1e-5);
    }

    #[test]
    fn operator_preserves_integrals() {
        let op = build(&moebius(-0.11), 1.0, 25).unwrap();
        let one = alloc::vec![1.0; 25];
        let image = op.apply(&one);
        assert!((op.grid().integrate(&image) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn densities() {
        let h = invariant_density_smooth(&moebius(0.0), 16).unwrap();
        assert!(h.values().iter().all(|v| (v - 0.5).abs() < 1e-12));
        let h = invariant_density_smooth(&moebius(-0.11), 25).unwrap();
        assert!(h.values().iter().all(|&v| v > 0.0));
        assert!((h.integral() - 1.0).abs() < 1e-8);
        assert!(h.residual() < 1e-8);
    }

    #[test]
    fn lyapunov_values() {
        assert!((lyapunov_smooth(&moebius(0.0), 16).unwrap() - core::f64::consts::LN_2).abs() < 1e-10);
        let l = lyapunov_smooth(&moebius(-0.11), 25).unwrap();
        assert!((l - 0.6849333).abs() < 1e-6, "{l}");
    }

    #[test]
    fn essential_radius() {
        let r = essential_radius_bound(&moebius(-0.11), 3).unwrap();
        assert!((r.s[0] - libm::log(1.56)).abs() < 1e-12);
        let t = essential_radius_bound(&moebius(0.0), 4).unwrap();
        for s in &t.s {
            assert!((s - core::f64::consts::LN_2).abs() < 1e-14);
        }
    }

    #[test]
    fn sweep_flags_signs() {
        let rows = spectrum_vs_parameter(&[-0.12, -0.11, -0.10], 1.0, 25, 3).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].sign, Some(1.0));
        assert_eq!(argmin_subleading(&rows).unwrap().0, -0.11);
    }

    #[test]
    fn order_is_checked() {
        assert!(build(&moebius(0.1), 1.0, 3).is_err());
    }
}
