//! Quadrature rules on `[−1, 1]`: Gauss–Legendre and Fejér's first rule on
//! Chebyshev points of the first kind.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::map_model::Interval;
use crate::num;

/// Chebyshev points of the first kind, `cos((2j+1)π/2n)`, `j = 0..n`
/// (descending order).
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (0..n).map(|j| num::cos((2 * j + 1) as f64 * PI / (2 * n) as f64)).collect()
}

/// Fejér first-rule weights for [`chebyshev_points`]; they sum to 2 and
/// integrate polynomials of degree `< n` exactly.
pub fn fejer_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let theta = (2 * k + 1) as f64 * PI / (2 * n) as f64;
            let s: f64 = (1..=n / 2)
                .map(|j| num::cos(2.0 * j as f64 * theta) / (4.0 * (j * j) as f64 - 1.0))
                .sum();
            2.0 / n as f64 * (1.0 - 2.0 * s)
        })
        .collect()
}

/// `n`-point Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = num::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n′(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Maps a point of `[−1, 1]` affinely onto `iv`.
pub fn to_interval(iv: Interval, t: f64) -> f64 {
    iv.lerp(0.5 * (t + 1.0))
}

/// `∫_iv f` with an `n`-point Gauss–Legendre rule.
pub fn integrate(iv: Interval, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(n);
    0.5 * iv.len() * x.iter().zip(&w).map(|(&t, &wt)| wt * f(to_interval(iv, t))).sum::<f64>()
}
