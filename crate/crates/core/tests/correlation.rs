use dynspec_core::correlation::{
    lyapunov_orbit, simulate, simulate_shard, CorrelationSeries, EnsembleConfig, Observable,
};
use dynspec_core::random_map::{random_markov_map, RandomMapConfig};
use dynspec_core::rng::CounterRng;
use dynspec_core::{spectral, PiecewiseLinearMarkovMap, SmoothFullBranchMap};

#[test]
fn doubling_identity_decays_by_halves() {
    // ∫ x·frac(2ⁿx) dx − ¼ = 2⁻ⁿ/12, so C(n)/C(0) = 2⁻ⁿ. Orbits stay short
    // because doubling discards one mantissa bit per step.
    let cfg = EnsembleConfig { n_max: 8, ensemble: 200_000, length: 30, transient: 0, seed: 11, shards: 32, ..Default::default() };
    let s = simulate(&PiecewiseLinearMarkovMap::doubling(), &Observable::Identity, &Observable::Identity, &cfg).unwrap();
    assert!((s.c[0] - 1.0 / 12.0).abs() < 5.0 * s.stderr[0]);
    for n in 1..=8 {
        let want = 0.5f64.powi(n as i32) * s.c[0];
        assert!((s.c[n] - want).abs() <= 3.0 * s.stderr[n] + 1e-12, "lag {n}: {} vs {want} ± {}", s.c[n], s.stderr[n]);
    }
}

#[test]
fn simulation_is_reproducible() {
    let f = SmoothFullBranchMap::moebius(-0.11).unwrap();
    let cfg = EnsembleConfig { n_max: 6, ensemble: 3_000, length: 100, transient: 20, seed: 5, shards: 7, ..Default::default() };
    let phi = Observable::step(0.5);
    let a = simulate(&f, &phi, &phi, &cfg).unwrap();
    let b = simulate(&f, &phi, &phi, &cfg).unwrap();
    assert_eq!(a, b);
    let other = simulate(&f, &phi, &phi, &EnsembleConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.c, other.c);
    assert!(a.c[0] > 0.0);
    assert!(a.stderr.iter().all(|s| *s >= 0.0));
}

#[test]
fn half_ensembles_agree() {
    let f = SmoothFullBranchMap::moebius(-0.11).unwrap();
    let cfg = EnsembleConfig { n_max: 10, ensemble: 40_000, length: 200, transient: 100, seed: 9, shards: 40, ..Default::default() };
    let phi = Observable::step(0.5);
    let shards: Vec<_> = (0..cfg.shards).map(|s| simulate_shard(&f, &phi, &phi, &cfg, s)).collect();
    let first = CorrelationSeries::from_shards(cfg, &shards[..20]);
    let second = CorrelationSeries::from_shards(cfg, &shards[20..]);
    for n in 0..=10 {
        let combined = (first.stderr[n].powi(2) + second.stderr[n].powi(2)).sqrt();
        assert!((first.c[n] - second.c[n]).abs() <= 5.0 * combined, "lag {n}");
    }
}

#[test]
fn orbit_lyapunov_matches_exact_on_random_maps() {
    let mut rng = CounterRng::new(2024);
    for i in 0..20 {
        let map = random_markov_map(&mut rng, &RandomMapConfig::default()).unwrap();
        let exact = spectral::lyapunov_exact(&map).unwrap();
        let x0 = rng.next_f64();
        let est = lyapunov_orbit(&map, x0, 1_000_000).unwrap();
        assert!((est.value - exact).abs() <= 3.0 * est.stderr, "map {i}: {} vs {exact} ± {}", est.value, est.stderr);
    }
}

#[test]
fn golden_orbit_lyapunov() {
    let est = lyapunov_orbit(&PiecewiseLinearMarkovMap::golden(), 0.3141, 1_000_000).unwrap();
    assert!((est.value - 0.4774).abs() < 0.002);
}

#[test]
fn monte_carlo_matches_operator_correlations() {
    // C(n) = ∫ φ · Lⁿ(ψ h) dx − ∫ φ h ∫ ψ h through the collocation matrix.
    let f = SmoothFullBranchMap::moebius(0.3).unwrap();
    let op = dynspec_core::chebyshev::build(&f, 1.0, 40).unwrap();
    let h = dynspec_core::chebyshev::density_of(&op).unwrap();
    let grid = op.grid();
    let x = grid.nodes();
    let mean = grid.integrate(&x.iter().zip(h.values()).map(|(x, h)| x * h).collect::<Vec<_>>());
    let mut g: Vec<f64> = x.iter().zip(h.values()).map(|(x, h)| x * h).collect();
    let mut exact = Vec::new();
    for _ in 0..=6 {
        exact.push(grid.integrate(&x.iter().zip(&g).map(|(x, g)| x * g).collect::<Vec<_>>()) - mean * mean);
        g = op.apply(&g);
    }

    let cfg = EnsembleConfig { n_max: 6, ensemble: 50_000, length: 400, transient: 100, seed: 3, shards: 25, ..Default::default() };
    let s = simulate(&f, &Observable::Identity, &Observable::Identity, &cfg).unwrap();
    for n in 0..=6 {
        assert!((s.c[n] - exact[n]).abs() <= 4.0 * s.stderr[n], "lag {n}: {} vs {} ± {}", s.c[n], exact[n], s.stderr[n]);
    }
}
