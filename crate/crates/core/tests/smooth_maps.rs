use dynspec_core::chebyshev::{self, build, invariant_density_smooth, lyapunov_smooth};
use dynspec_core::linearize::{cylinders, linearize};
use dynspec_core::quadrature::integrate;
use dynspec_core::{spectral, FullBranchMap, Interval, SmoothFullBranchMap};

fn moebius(c: f64) -> SmoothFullBranchMap {
    SmoothFullBranchMap::moebius(c).unwrap()
}

#[test]
fn cylinders_refine() {
    let f = moebius(-0.11);
    for n in 1..6 {
        let coarse = cylinders(&f, n).unwrap();
        let fine = cylinders(&f, n + 1).unwrap();
        for cyl in &fine {
            let parents = coarse
                .iter()
                .filter(|c| c.interval.lo() <= cyl.interval.lo() && cyl.interval.hi() <= c.interval.hi())
                .count();
            assert_eq!(parents, 1);
        }
        // Level-n cylinders tile the domain.
        let mut ivs: Vec<Interval> = coarse.iter().map(|c| c.interval).collect();
        ivs.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
        assert_eq!(ivs[0].lo(), -1.0);
        assert_eq!(ivs[ivs.len() - 1].hi(), 1.0);
        for w in ivs.windows(2) {
            assert_eq!(w[0].hi(), w[1].lo());
        }
    }
}

#[test]
fn linearizations_satisfy_the_bound_chain() {
    let f = moebius(-0.11);
    for n in 1..=6 {
        let fn_ = linearize(&f, n).unwrap();
        assert!(fn_.is_mixing());
        let v = spectral::verify_bounds(&fn_, 3).unwrap();
        assert!(v.all_pass(), "level {n}: {:?}", v.failures());
        let nu2 = (-v.minus_ln_nu2).exp();
        assert!(nu2 >= (-2.0 * v.lambda_exp).exp() * (1.0 - 1e-12));
    }
}

#[test]
fn linearized_lyapunov_matches_quadrature() {
    let f = moebius(-0.11);
    let smooth = lyapunov_smooth(&f, 25).unwrap();
    let l6 = spectral::lyapunov_exact(&linearize(&f, 6).unwrap()).unwrap();
    assert!((l6 - smooth).abs() <= 2e-2);
}

#[test]
fn lyapunov_quadrature_against_dense_trapezoid() {
    // Independent route: composite trapezoid rule on a fine grid.
    let f = moebius(-0.2);
    let h = invariant_density_smooth(&f, 30).unwrap();
    let n = 200_000;
    let mut total = 0.0;
    for b in 0..2 {
        let d = f.branch_domain(b);
        let step = d.len() / n as f64;
        for i in 0..=n {
            let x = d.lo() + i as f64 * step;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            total += w * step * f.deriv_branch(b, x).abs().ln() * h.eval(x);
        }
    }
    let quad = chebyshev::lyapunov_against(&f, &h);
    assert!((quad - total).abs() < 1e-8, "{quad} vs {total}");
    assert!((quad - 0.66476).abs() < 1e-5);
}

#[test]
fn density_is_a_fixed_point() {
    let f = moebius(-0.11);
    let op = build(&f, 1.0, 25).unwrap();
    let h = chebyshev::density_of(&op).unwrap();
    let image = op.apply(h.values());
    let err = image.iter().zip(h.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = h.values().iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(err / scale <= 1e-8);
    assert!((h.integral() - 1.0).abs() <= 1e-8);
    // Gauss–Legendre integral of the interpolant agrees with the node rule.
    let gl = integrate(Interval::new(-1.0, 1.0).unwrap(), 64, |x| h.eval(x));
    assert!((gl - 1.0).abs() < 1e-10);
}

#[test]
fn leading_eigenvalues_converge_in_the_order() {
    let f = moebius(-0.11);
    let a = build(&f, 1.0, 25).unwrap().eigenvalues().unwrap();
    let b = build(&f, 1.0, 35).unwrap().eigenvalues().unwrap();
    for i in 0..5 {
        assert!(a[i].sub(b[i]).norm() <= 1e-6, "eigenvalue {i}: {:?} vs {:?}", a[i], b[i]);
    }
    for c in [-0.2, -0.11, 0.0, 0.1, 0.2] {
        let g = moebius(c);
        let a = build(&g, 1.0, 25).unwrap().eigenvalues().unwrap();
        let b = build(&g, 1.0, 35).unwrap().eigenvalues().unwrap();
        for i in 0..3 {
            assert!((a[i].norm() - b[i].norm()).abs() <= 1e-6, "c={c} rank {i}");
        }
    }
}

#[test]
fn analytic_mixing_rate_exceeds_twice_lyapunov() {
    let f = moebius(-0.11);
    let spec = chebyshev::spectrum(&f, 1.0, 25).unwrap();
    let lyap = lyapunov_smooth(&f, 25).unwrap();
    assert!(spec.mixing_rate > 2.0 * lyap);
}

#[test]
fn essential_radius_rates_stay_below_lyapunov() {
    for c in [-0.2, -0.11, 0.05, 0.3] {
        let f = moebius(c);
        let lyap = lyapunov_smooth(&f, 30).unwrap();
        let r = chebyshev::essential_radius_bound(&f, 8).unwrap();
        for (k, s) in r.s.iter().enumerate() {
            assert!(*s <= lyap + 1e-6, "c={c} k={}", k + 1);
        }
        assert!(r.alpha_bv_bound <= lyap + 1e-6);
    }
}

#[test]
fn essential_radius_first_level_matches_direct_minimum() {
    // inf |F'| by brute force on a fine grid over x.
    let f = moebius(0.3);
    let mut inf = f64::INFINITY;
    for i in 0..=100_000 {
        let x = -1.0 + 2.0 * i as f64 / 100_000.0;
        let b = f.branch_of(x).unwrap();
        inf = inf.min(f.deriv_branch(b, x).abs());
    }
    let r = chebyshev::essential_radius_bound(&f, 1).unwrap();
    assert!((r.s[0] - inf.ln()).abs() < 1e-12);
}
