//! Dense nonsymmetric eigenvalues and Perron eigenpairs.
//!
//! Eigenvalues are computed by balancing, Householder reduction to upper
//! Hessenberg form and the implicitly shifted (Francis double-shift) QR
//! iteration. Only eigenvalues are produced; no Schur vectors are kept.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::linalg::{Complex, Matrix};
use crate::num;
use crate::{Error, Result};

/// QR sweeps allowed per unit of dimension before giving up.
pub const QR_ITERATIONS_PER_DIM: usize = 100;

/// Relative change at which power iteration is considered converged.
pub const PERRON_TOLERANCE: f64 = 1e-13;

const PERRON_MAX_ITERATIONS: usize = 200_000;

/// All eigenvalues of a square matrix, with algebraic multiplicity, sorted
/// by descending modulus (ties: descending real part, then imaginary part).
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries"));
    }
    let n = a.rows();
    let mut h = Hess::from_matrix(a);
    h.balance();
    h.reduce_to_hessenberg();
    let mut values = h.hqr(QR_ITERATIONS_PER_DIM * n.max(1))?;
    sort_descending(&mut values);
    Ok(values)
}

/// Sorts eigenvalues by descending modulus, then descending real part,
/// then descending imaginary part.
pub fn sort_descending(values: &mut [Complex]) {
    values.sort_by(|a, b| compare_descending(*a, *b));
}

pub(crate) fn compare_descending(a: Complex, b: Complex) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

/// Spectral radius, i.e. the largest eigenvalue modulus.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    Ok(eigenvalues(a)?.first().map_or(0.0, |z| z.norm()))
}

/// Unshifted iterations used to estimate the Perron root before shifting.
const PERRON_WARMUP: usize = 64;

/// Perron root and positive right eigenvector (normalized to unit sum) of a
/// nonnegative irreducible matrix, by power iteration on `A + sI`.
///
/// The shift `s` is a rough estimate of the root. It leaves the eigenvector
/// unchanged and separates the root from eigenvalues near `−ν` (or near
/// other roots of unity times `ν`), which plain power iteration resolves only
/// at the rate `|λ|/ν`.
pub fn perron(a: &Matrix) -> Result<(f64, Vec<f64>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix"));
    }
    if a.as_slice().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("Perron iteration needs a nonnegative finite matrix"));
    }
    let mut v = vec![1.0 / n as f64; n];
    let mut shift = 0.0;
    for _ in 0..PERRON_WARMUP {
        let w = a.mul_vec(&v);
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::NonPositiveVector);
        }
        shift = s;
        v = w.into_iter().map(|x| x / s).collect();
    }
    // Restart from the uniform vector so the result does not depend on the
    // warm-up iterate.
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = f64::NAN;
    let mut converged = false;
    for _ in 0..PERRON_MAX_ITERATIONS {
        let mut w = a.mul_vec(&v);
        for (x, y) in w.iter_mut().zip(&v) {
            *x += shift * y;
        }
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::NonPositiveVector);
        }
        for x in &mut w {
            *x /= s;
        }
        let scale = w.iter().cloned().fold(0.0, f64::max);
        let change = w
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale;
        let lambda_change = (s - lambda).abs() / s;
        v = w;
        lambda = s;
        if change <= PERRON_TOLERANCE && lambda_change <= PERRON_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged { iterations: PERRON_MAX_ITERATIONS });
    }
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NonPositiveVector);
    }
    let av = a.mul_vec(&v);
    let root = av.iter().sum::<f64>() / v.iter().sum::<f64>();
    Ok((root, v))
}

/// Working copy for the eigenvalue pipeline.
struct Hess {
    n: usize,
    a: Vec<f64>,
}

impl Hess {
    fn from_matrix(m: &Matrix) -> Self {
        Hess { n: m.rows(), a: m.as_slice().to_vec() }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }

    /// Diagonal similarity scaling by powers of two so that row and column
    /// norms are comparable.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        const SQRDX: f64 = RADIX * RADIX;
        let n = self.n;
        loop {
            let mut done = true;
            for i in 0..n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 0..n {
                    if j != i {
                        c += self.at(j, i).abs();
                        r += self.at(i, j).abs();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        *self.at_mut(i, j) *= g;
                    }
                    for j in 0..n {
                        *self.at_mut(j, i) *= f;
                    }
                }
            }
            if done {
                break;
            }
        }
    }

    fn reduce_to_hessenberg(&mut self) {
        let n = self.n;
        if n < 3 {
            return;
        }
        let mut v = vec![0.0; n];
        for k in 0..n - 2 {
            let len = n - k - 1;
            let mut norm = 0.0;
            for i in 0..len {
                v[i] = self.at(k + 1 + i, k);
                norm += v[i] * v[i];
            }
            norm = num::sqrt(norm);
            if norm == 0.0 {
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vnorm = num::sqrt(v[..len].iter().map(|x| x * x).sum());
            if vnorm == 0.0 {
                continue;
            }
            for x in &mut v[..len] {
                *x /= vnorm;
            }
            // H A
            for j in k..n {
                let mut s = 0.0;
                for i in 0..len {
                    s += v[i] * self.at(k + 1 + i, j);
                }
                for i in 0..len {
                    *self.at_mut(k + 1 + i, j) -= 2.0 * v[i] * s;
                }
            }
            // (H A) H
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..len {
                    s += self.at(i, k + 1 + j) * v[j];
                }
                for j in 0..len {
                    *self.at_mut(i, k + 1 + j) -= 2.0 * s * v[j];
                }
            }
            *self.at_mut(k + 1, k) = alpha;
            for i in k + 2..n {
                *self.at_mut(i, k) = 0.0;
            }
        }
    }

    /// Francis double-shift QR on the Hessenberg matrix.
    fn hqr(&mut self, max_total: usize) -> Result<Vec<Complex>> {
        let n = self.n;
        let mut wr = vec![0.0; n];
        let mut wi = vec![0.0; n];
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut anorm = 0.0;
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                anorm += self.at(i, j).abs();
            }
        }
        let mut nn = n as isize - 1;
        let mut t = 0.0;
        let mut total = 0usize;
        let (mut p, mut q, mut r): (f64, f64, f64);
        let (mut x, mut y, mut z, mut w);
        while nn >= 0 {
            let mut its = 0usize;
            let mut l: isize;
            loop {
                // Look for a single small subdiagonal element.
                l = nn;
                while l >= 1 {
                    let lu = l as usize;
                    let mut s = self.at(lu - 1, lu - 1).abs() + self.at(lu, lu).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(lu, lu - 1).abs() + s == s {
                        *self.at_mut(lu, lu - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                let nu = nn as usize;
                x = self.at(nu, nu);
                if l == nn {
                    wr[nu] = x + t;
                    wi[nu] = 0.0;
                    nn -= 1;
                } else {
                    y = self.at(nu - 1, nu - 1);
                    w = self.at(nu, nu - 1) * self.at(nu - 1, nu);
                    if l == nn - 1 {
                        p = 0.5 * (y - x);
                        q = p * p + w;
                        z = num::sqrt(q.abs());
                        x += t;
                        if q >= 0.0 {
                            z = p + if p >= 0.0 { z.abs() } else { -z.abs() };
                            wr[nu - 1] = x + z;
                            wr[nu] = x + z;
                            if z != 0.0 {
                                wr[nu] = x - w / z;
                            }
                            wi[nu - 1] = 0.0;
                            wi[nu] = 0.0;
                        } else {
                            wr[nu - 1] = x + p;
                            wr[nu] = x + p;
                            wi[nu - 1] = -z;
                            wi[nu] = z;
                        }
                        nn -= 2;
                    } else {
                        if total >= max_total {
                            return Err(Error::NoConvergence { iterations: max_total });
                        }
                        if its > 0 && its % 10 == 0 {
                            // Exceptional shift.
                            t += x;
                            for i in 0..=nu {
                                *self.at_mut(i, i) -= x;
                            }
                            let s = self.at(nu, nu - 1).abs() + self.at(nu - 1, nu - 2).abs();
                            x = 0.75 * s;
                            y = x;
                            w = -0.4375 * s * s;
                        }
                        its += 1;
                        total += 1;
                        let lu = l as usize;
                        // Look for two consecutive small subdiagonal elements.
                        let mut m = nu - 2;
                        loop {
                            z = self.at(m, m);
                            let rr = x - z;
                            let ss = y - z;
                            p = (rr * ss - w) / self.at(m + 1, m) + self.at(m, m + 1);
                            q = self.at(m + 1, m + 1) - z - rr - ss;
                            r = self.at(m + 2, m + 1);
                            let s = p.abs() + q.abs() + r.abs();
                            p /= s;
                            q /= s;
                            r /= s;
                            if m == lu {
                                break;
                            }
                            let u = self.at(m, m - 1).abs() * (q.abs() + r.abs());
                            let v = p.abs()
                                * (self.at(m - 1, m - 1).abs() + z.abs() + self.at(m + 1, m + 1).abs());
                            if u + v == v {
                                break;
                            }
                            m -= 1;
                        }
                        for i in m + 2..=nu {
                            *self.at_mut(i, i - 2) = 0.0;
                            if i != m + 2 {
                                *self.at_mut(i, i - 3) = 0.0;
                            }
                        }
                        // Double QR step on rows l..nn and columns m..nn.
                        let mut k = m;
                        while k + 1 <= nu {
                            if k != m {
                                p = self.at(k, k - 1);
                                q = self.at(k + 1, k - 1);
                                r = 0.0;
                                if k != nu - 1 {
                                    r = self.at(k + 2, k - 1);
                                }
                                x = p.abs() + q.abs() + r.abs();
                                if x != 0.0 {
                                    p /= x;
                                    q /= x;
                                    r /= x;
                                }
                            }
                            let norm = num::sqrt(p * p + q * q + r * r);
                            let s = if p >= 0.0 { norm } else { -norm };
                            if s != 0.0 {
                                if k == m {
                                    if lu != m {
                                        *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                                    }
                                } else {
                                    *self.at_mut(k, k - 1) = -s * x;
                                }
                                p += s;
                                x = p / s;
                                y = q / s;
                                z = r / s;
                                q /= p;
                                r /= p;
                                for j in k..=nu {
                                    p = self.at(k, j) + q * self.at(k + 1, j);
                                    if k != nu - 1 {
                                        p += r * self.at(k + 2, j);
                                        *self.at_mut(k + 2, j) -= p * z;
                                    }
                                    *self.at_mut(k + 1, j) -= p * y;
                                    *self.at_mut(k, j) -= p * x;
                                }
                                let mmin = if nu < k + 3 { nu } else { k + 3 };
                                for i in lu..=mmin {
                                    p = x * self.at(i, k) + y * self.at(i, k + 1);
                                    if k != nu - 1 {
                                        p += z * self.at(i, k + 2);
                                        *self.at_mut(i, k + 2) -= p * r;
                                    }
                                    *self.at_mut(i, k + 1) -= p * q;
                                    *self.at_mut(i, k) -= p;
                                }
                            }
                            k += 1;
                        }
                    }
                }
                if !(l < nn - 1) {
                    break;
                }
            }
        }
        Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rank_one_row_identical() {
        let a = Matrix::from_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let ev = eigenvalues(&a).unwrap();
        assert!(close(ev[0].re, 1.0, 1e-14) && ev[0].im == 0.0);
        assert!(ev[1].norm() < 1e-14);
    }

    #[test]
    fn golden_block_has_minus_one_third() {
        // Characteristic polynomial λ² − ⅔λ − ⅓.
        let a = Matrix::from_rows(&[&[2.0 / 3.0, 0.5], &[2.0 / 3.0, 0.0]]);
        let ev = eigenvalues(&a).unwrap();
        assert!(close(ev[0].re, 1.0, 1e-14));
        assert!(close(ev[1].re, -1.0 / 3.0, 1e-14));
    }

    #[test]
    fn nilpotent_tent_block() {
        let a = Matrix::from_rows(&[&[0.25, -0.25], &[0.25, -0.25]]);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-7), "{ev:?}");
    }

    #[test]
    fn rotation_gives_conjugate_pair_sorted() {
        let a = Matrix::from_rows(&[&[0.0, -2.0], &[2.0, 0.0]]);
        let ev = eigenvalues(&a).unwrap();
        assert!(close(ev[0].im, 2.0, 1e-14) && close(ev[1].im, -2.0, 1e-14));
    }

    #[test]
    fn companion_matrix_roots() {
        // (x-1)(x-2)(x-3)(x+4) = x⁴ - 2x³ - 13x² + 38x - 24
        let a = Matrix::from_rows(&[
            &[2.0, 13.0, -38.0, 24.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        let ev = eigenvalues(&a).unwrap();
        let re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        for (got, want) in re.iter().zip([-4.0, 3.0, 2.0, 1.0]) {
            assert!(close(*got, want, 1e-10), "{re:?}");
        }
    }

    #[test]
    fn rejects_non_square_and_nan() {
        assert!(eigenvalues(&Matrix::zeros(2, 3)).is_err());
        let a = Matrix::from_rows(&[&[f64::NAN]]);
        assert!(eigenvalues(&a).is_err());
        assert!(eigenvalues(&Matrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn perron_uniform_and_golden() {
        let (root, v) = perron(&Matrix::from_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        assert!(close(root, 1.0, 1e-14));
        assert!(close(v[0], 0.5, 1e-14) && close(v[1], 0.5, 1e-14));

        let (root, v) = perron(&Matrix::from_rows(&[&[2.0 / 3.0, 0.5], &[2.0 / 3.0, 0.0]])).unwrap();
        assert!(close(root, 1.0, 1e-13));
        // u₂ = ⅔ u₁
        assert!(close(v[1] / v[0], 2.0 / 3.0, 1e-12));

        // T⁰⁰(2) for the golden map.
        let (root, _) =
            perron(&Matrix::from_rows(&[&[4.0 / 9.0, 0.25], &[4.0 / 9.0, 0.0]])).unwrap();
        let want = (4.0 / 9.0 + libm::sqrt(16.0 / 81.0 + 4.0 / 9.0)) / 2.0;
        assert!(close(root, want, 1e-13));
        assert!(close(root, 0.62284, 1e-5));
    }

    #[test]
    fn perron_rejects_negative_input() {
        let neg = Matrix::from_rows(&[&[1.0, -1.0], &[0.0, 1.0]]);
        assert!(perron(&neg).is_err());
    }

    #[test]
    fn perron_handles_periodic_and_defective_cases() {
        // Eigenvalues ±1: the shift separates them.
        let periodic = Matrix::from_rows(&[&[0.0, 2.0], &[0.5, 0.0]]);
        let (root, v) = perron(&periodic).unwrap();
        assert!(close(root, 1.0, 1e-12));
        assert!(close(v[0], 2.0 / 3.0, 1e-12) && close(v[1], 1.0 / 3.0, 1e-12));
        // Jordan block: iterates converge only algebraically.
        let jordan = Matrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(perron(&jordan), Err(Error::NotConverged { .. })));
    }
}
