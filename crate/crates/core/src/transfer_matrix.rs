//! Exact matrix representation of the weighted transfer operator
//! `(L_β h)(x) = Σ_{f(y)=x} h(y) / |f′(y)|^β` on piecewise polynomials.
//!
//! For a piecewise linear Markov map with slopes `γ_l`, intercepts `d_l` and
//! transition matrix `A`, the operator maps the basis function `x^n χ_l` to a
//! combination of `x^m χ_k` with `m ≤ n`. Collecting coefficients gives a
//! block upper-triangular matrix whose `(m, n)` block has entries
//!
//! ```text
//! T^(mn)_kl(β) = A_lk · |γ_l|^(−β−n) · sign(γ_l)^n · (−d_l)^(n−m) · C(n, n−m)
//! ```
//!
//! The weight `|γ|^(−β)·γ^(−n)` is evaluated as `|γ|^(−(β+n))·sign(γ)^n`, so
//! `T^(22)(β)` and `T^(00)(β+2)` (and, for a common slope sign,
//! `T^(11)(β)` and `±T^(00)(β+1)`) agree bit for bit.
//!
//! The basis is the monomial basis centered at 0, which limits useful degrees
//! to roughly `M ≤ 30` on unit-scale domains.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::map_model::PiecewiseLinearMarkovMap;
use crate::num;
use crate::{Error, Result};

/// Largest degree supported by the exact binomial table.
pub const MAX_DEGREE: usize = 60;

/// Row `n` of Pascal's triangle, computed exactly in integers.
pub fn binomial_row(n: usize) -> Result<Vec<u64>> {
    if n > MAX_DEGREE {
        return Err(Error::InvalidArgument("degree exceeds the exact binomial range"));
    }
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    Ok(row)
}

/// `|γ|^(−(β+n)) · sign(γ)^n`
#[inline]
fn weight(slope: f64, beta: f64, n: usize) -> f64 {
    let w = num::powf(slope.abs(), -(beta + n as f64));
    if slope < 0.0 && n % 2 == 1 {
        -w
    } else {
        w
    }
}

/// The `N×N` block `T^(mn)(β)`.
pub fn block(map: &PiecewiseLinearMarkovMap, beta: f64, m: usize, n: usize) -> Result<Matrix> {
    if m > n {
        return Err(Error::DegreeOrder { m, n });
    }
    let binom = binomial_row(n)?[n - m] as f64;
    Ok(block_with(map, beta, m, n, binom))
}

fn block_with(map: &PiecewiseLinearMarkovMap, beta: f64, m: usize, n: usize, binom: f64) -> Matrix {
    let size = map.len();
    let a = map.transition();
    let column: Vec<f64> = (0..size)
        .map(|l| {
            let g = map.slopes()[l];
            let shift = num::powi(-map.intercepts()[l], (n - m) as i32);
            weight(g, beta, n) * shift * binom
        })
        .collect();
    Matrix::from_fn(size, size, |k, l| if a.get(l, k) { column[l] } else { 0.0 })
}

/// Block upper-triangular representation of `L_β` on piecewise
/// polynomials of degree `≤ M`, in degree-major coefficient order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTransferMatrix {
    beta: f64,
    degree: usize,
    elements: usize,
    breakpoints: Vec<f64>,
    /// Blocks `(m, n)` with `m ≤ n`, row by row.
    blocks: Vec<Matrix>,
}

impl BlockTransferMatrix {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of partition elements `N`.
    pub fn elements(&self) -> usize {
        self.elements
    }

    /// Side length `N·(M+1)` of the full matrix.
    pub fn dim(&self) -> usize {
        self.elements * (self.degree + 1)
    }

    fn slot(&self, m: usize, n: usize) -> usize {
        // Row m holds blocks (m, m..=M).
        let before: usize = (0..m).map(|r| self.degree + 1 - r).sum();
        before + (n - m)
    }

    /// Block `(m, n)`; `None` strictly below the diagonal or out of range.
    pub fn block(&self, m: usize, n: usize) -> Option<&Matrix> {
        (m <= n && n <= self.degree).then(|| &self.blocks[self.slot(m, n)])
    }

    pub fn diagonal_block(&self, m: usize) -> &Matrix {
        &self.blocks[self.slot(m, m)]
    }

    /// Coefficient index of `x^m χ_k`.
    pub fn index(&self, m: usize, k: usize) -> usize {
        m * self.elements + k
    }

    /// The full `N(M+1) × N(M+1)` matrix.
    pub fn dense(&self) -> Matrix {
        let n = self.elements;
        let mut out = Matrix::zeros(self.dim(), self.dim());
        for m in 0..=self.degree {
            for q in m..=self.degree {
                out.set_block(m * n, q * n, &self.blocks[self.slot(m, q)]);
            }
        }
        out
    }
}

/// Assembles all blocks `T^(mn)(β)` for `0 ≤ m ≤ n ≤ M`.
pub fn assemble(map: &PiecewiseLinearMarkovMap, beta: f64, degree: usize) -> Result<BlockTransferMatrix> {
    if !beta.is_finite() {
        return Err(Error::InvalidArgument("beta must be finite"));
    }
    let mut blocks = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
    let rows: Vec<Vec<u64>> = (0..=degree).map(binomial_row).collect::<Result<_>>()?;
    for m in 0..=degree {
        for n in m..=degree {
            blocks.push(block_with(map, beta, m, n, rows[n][n - m] as f64));
        }
    }
    Ok(BlockTransferMatrix {
        beta,
        degree,
        elements: map.len(),
        breakpoints: map.breakpoints().to_vec(),
        blocks,
    })
}

/// `x ↦ Σ_m a_{km} x^m` on each partition element `I_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    degree: usize,
    /// Row-major `N × (M+1)`: `coeffs[k*(M+1) + m] = a_{km}`.
    coeffs: Vec<f64>,
}

impl PiecewisePolynomial {
    /// Coefficients given per element, lowest degree first. All elements
    /// must have the same number of coefficients.
    pub fn new(breakpoints: Vec<f64>, per_element: &[Vec<f64>]) -> Result<Self> {
        let n = breakpoints.len().saturating_sub(1);
        if per_element.len() != n || n == 0 {
            return Err(Error::DimensionMismatch { expected: n, found: per_element.len() });
        }
        let width = per_element[0].len();
        if width == 0 {
            return Err(Error::InvalidArgument("empty coefficient list"));
        }
        let mut coeffs = Vec::with_capacity(n * width);
        for row in per_element {
            if row.len() != width {
                return Err(Error::DimensionMismatch { expected: width, found: row.len() });
            }
            coeffs.extend_from_slice(row);
        }
        Ok(PiecewisePolynomial { breakpoints, degree: width - 1, coeffs })
    }

    /// Piecewise constant function with the given element values.
    pub fn constant(breakpoints: Vec<f64>, values: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Self::new(breakpoints, &rows)
    }

    pub fn zeros(breakpoints: Vec<f64>, degree: usize) -> Self {
        let n = breakpoints.len() - 1;
        PiecewisePolynomial { breakpoints, degree, coeffs: vec![0.0; n * (degree + 1)] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coeff(&self, k: usize, m: usize) -> f64 {
        self.coeffs[k * (self.degree + 1) + m]
    }

    pub fn coeff_mut(&mut self, k: usize, m: usize) -> &mut f64 {
        &mut self.coeffs[k * (self.degree + 1) + m]
    }

    /// Coefficients of element `k`, lowest degree first.
    pub fn element_coeffs(&self, k: usize) -> &[f64] {
        &self.coeffs[k * (self.degree + 1)..(k + 1) * (self.degree + 1)]
    }

    /// Polynomial of element `k` evaluated at `x` (no domain check).
    pub fn eval_on(&self, k: usize, x: f64) -> f64 {
        self.element_coeffs(k).iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// Value at `x`, using the right-ownership rule at breakpoints.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let n = self.elements();
        if !(self.breakpoints[0] <= x && x <= self.breakpoints[n]) {
            return Err(Error::OutOfDomain { x });
        }
        let k = self.breakpoints.partition_point(|&b| b <= x).saturating_sub(1).min(n - 1);
        Ok(self.eval_on(k, x))
    }

    /// `∫ p dx` over the whole domain.
    pub fn integral(&self) -> f64 {
        (0..self.elements())
            .map(|k| {
                let (a, b) = (self.breakpoints[k], self.breakpoints[k + 1]);
                self.element_coeffs(k)
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| {
                        let e = (m + 1) as i32;
                        c * (num::powi(b, e) - num::powi(a, e)) / e as f64
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Coefficients of `L_β p`, at the degree of `t`.
pub fn apply(t: &BlockTransferMatrix, p: &PiecewisePolynomial) -> Result<PiecewisePolynomial> {
    if p.elements() != t.elements || p.breakpoints != t.breakpoints {
        return Err(Error::DimensionMismatch { expected: t.elements, found: p.elements() });
    }
    if p.degree() > t.degree {
        return Err(Error::DimensionMismatch { expected: t.degree, found: p.degree() });
    }
    let n_el = t.elements;
    let mut out = PiecewisePolynomial::zeros(t.breakpoints.clone(), t.degree);
    for m in 0..=t.degree {
        for n in m..=p.degree() {
            let blk = &t.blocks[t.slot(m, n)];
            for k in 0..n_el {
                let row = blk.row(k);
                let s: f64 = (0..n_el).map(|l| row[l] * p.coeff(l, n)).sum();
                *out.coeff_mut(k, m) += s;
            }
        }
    }
    Ok(out)
}
