use dynspec_core::random_map::{random_markov_map, RandomMapConfig, SignPattern};
use dynspec_core::rng::CounterRng;
use dynspec_core::spectral::{self, Check};
use dynspec_core::transfer_matrix::{apply, assemble, block, PiecewisePolynomial};
use dynspec_core::{eigen, Complex, PiecewiseLinearMarkovMap};
use proptest::prelude::*;

fn map_from_seed(seed: u64, signs: SignPattern) -> PiecewiseLinearMarkovMap {
    let cfg = RandomMapConfig { signs, ..Default::default() };
    random_markov_map(&mut CounterRng::new(seed), &cfg).expect("generator converges")
}

fn signs() -> impl Strategy<Value = SignPattern> {
    prop_oneof![Just(SignPattern::AllPositive), Just(SignPattern::AllNegative), Just(SignPattern::Mixed)]
}

/// Transfer operator applied pointwise: sum over the branches whose image
/// covers `x`, evaluated through the branch inverses.
fn transfer_pointwise(map: &PiecewiseLinearMarkovMap, beta: f64, p: &PiecewisePolynomial, x: f64) -> f64 {
    let k = map.locate(x).unwrap();
    (0..map.len())
        .filter(|&l| map.transition().get(l, k))
        .map(|l| {
            let y = map.inverse_branch(k, l, x).unwrap();
            map.slopes()[l].abs().powf(-beta) * p.eval_on(l, y)
        })
        .sum()
}

fn contains_close(haystack: &[Complex], needle: Complex, tol: f64) -> bool {
    haystack.iter().any(|z| z.sub(needle).norm() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_action_matches_pointwise_transfer(
        seed in any::<u64>(),
        signs in signs(),
        beta in 0.0f64..3.0,
        degree in 0usize..4,
        coeffs in prop::collection::vec(-2.0f64..2.0, 24),
    ) {
        let map = map_from_seed(seed, signs);
        let n = map.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|k| (0..=degree).map(|m| coeffs[(k * 4 + m) % coeffs.len()]).collect())
            .collect();
        let p = PiecewisePolynomial::new(map.breakpoints().to_vec(), &rows).unwrap();
        let t = assemble(&map, beta, degree).unwrap();
        let q = apply(&t, &p).unwrap();
        for k in 0..n {
            let el = map.element(k);
            for t in [0.13, 0.5, 0.91] {
                let x = el.lerp(t);
                let want = transfer_pointwise(&map, beta, &p, x);
                let got = q.eval_on(k, x);
                prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "k={} x={} {} vs {}", k, x, got, want);
            }
        }
    }

    #[test]
    fn diagonal_identities_are_exact(seed in any::<u64>(), signs in signs(), beta in 0.0f64..3.0) {
        let map = map_from_seed(seed, signs);
        prop_assert_eq!(block(&map, beta, 2, 2).unwrap(), block(&map, beta + 2.0, 0, 0).unwrap());
        if let Some(s) = map.common_slope_sign() {
            let t11 = block(&map, beta, 1, 1).unwrap();
            let t00 = block(&map, beta + 1.0, 0, 0).unwrap();
            for (a, b) in t11.as_slice().iter().zip(t00.as_slice()) {
                prop_assert_eq!(*a, s * b);
            }
        }
    }

    #[test]
    fn pressure_and_lyapunov(seed in any::<u64>(), signs in signs()) {
        let map = map_from_seed(seed, signs);
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 * 0.25).collect();
        let r = spectral::verify_pressure_properties(&map, &grid).unwrap();
        prop_assert!(r.all_pass(), "{:?}", r);
        let h = spectral::invariant_density(&map).unwrap();
        prop_assert!((h.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_chains_hold(seed in any::<u64>(), signs in signs()) {
        let map = map_from_seed(seed, signs);
        let v = spectral::verify_bounds(&map, 4).unwrap();
        prop_assert!(v.all_pass(), "{:?}", v.failures());
        prop_assert_eq!(v.bound_1l == Check::NotApplicable, map.common_slope_sign().is_none());
        prop_assert!(v.alpha <= 2.0 * v.lambda_exp + 1e-9);
    }

    #[test]
    fn nested_spectrum(seed in any::<u64>(), signs in signs()) {
        let map = map_from_seed(seed, signs);
        let degree = 3;
        let full = spectral::full_matrix_spectrum(&map, 1.0, degree).unwrap();
        let union: Vec<Complex> = spectral::diagonal_spectrum(&map, 1.0, degree)
            .unwrap()
            .into_iter()
            .map(|e| e.value)
            .collect();
        for z in full.iter().filter(|z| z.norm() > 1e-6) {
            prop_assert!(contains_close(&union, *z, 1e-8), "{:?} missing", z);
        }
        let bigger = spectral::full_matrix_spectrum(&map, 1.0, degree + 1).unwrap();
        for z in full.iter().filter(|z| z.norm() > 1e-6) {
            prop_assert!(contains_close(&bigger, *z, 1e-8));
        }
        let leading = eigen::spectral_radius(&assemble(&map, 1.0, degree).unwrap().dense()).unwrap();
        prop_assert!((leading - 1.0).abs() < 1e-9);
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(rows: usize, mut a: Vec<f64>) -> f64 {
    let mut det = 1.0;
    for c in 0..rows {
        let p = (c..rows).max_by(|&i, &j| a[i * rows + c].abs().total_cmp(&a[j * rows + c].abs())).unwrap();
        if a[p * rows + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..rows {
                a.swap(p * rows + j, c * rows + j);
            }
            det = -det;
        }
        let pivot = a[c * rows + c];
        det *= pivot;
        for i in c + 1..rows {
            let f = a[i * rows + c] / pivot;
            for j in c..rows {
                a[i * rows + j] -= f * a[c * rows + j];
            }
        }
    }
    det
}

fn product(values: &[Complex]) -> Complex {
    values.iter().fold(Complex::real(1.0), |acc, z| acc.mul(*z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_reproduce_trace_and_determinant(
        n in 1usize..=12,
        data in prop::collection::vec(-1.0f64..1.0, 144),
    ) {
        let m = dynspec_core::Matrix::from_row_major(n, n, data[..n * n].to_vec());
        let eig = eigen::eigenvalues(&m).unwrap();
        prop_assert_eq!(eig.len(), n);
        let tr: f64 = eig.iter().map(|z| z.re).sum();
        let im: f64 = eig.iter().map(|z| z.im).sum();
        prop_assert!((tr - m.trace()).abs() <= 1e-8 * (1.0 + m.trace().abs()));
        prop_assert!(im.abs() <= 1e-8);
        let det = determinant(n, m.as_slice().to_vec());
        let p = product(&eig);
        prop_assert!((p.re - det).abs() <= 1e-8 * (1.0 + det.abs()), "{:?} vs {}", p, det);
        prop_assert!(p.im.abs() <= 1e-8 * (1.0 + det.abs()));
    }

    #[test]
    fn perron_matches_largest_eigenvalue(
        n in 1usize..=10,
        data in prop::collection::vec(0.0f64..1.0, 100),
        sparsity in prop::collection::vec(any::<bool>(), 100),
    ) {
        // A cycle through all indices keeps the sample irreducible.
        let m = dynspec_core::Matrix::from_fn(n, n, |i, j| {
            if j == (i + 1) % n { 0.5 + data[i * n + j] } else if sparsity[i * n + j] { data[i * n + j] } else { 0.0 }
        });
        let (root, v) = eigen::perron(&m).unwrap();
        let top = eigen::eigenvalues(&m).unwrap()[0];
        prop_assert!((root - top.norm()).abs() <= 1e-10 * root.max(1.0));
        prop_assert!(v.iter().all(|&x| x > 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn subleading_is_stable_in_the_degree(seed in any::<u64>(), signs in signs()) {
        let map = map_from_seed(seed, signs);
        let m = 2;
        let a = spectral::mixing_rate(&map, m).unwrap();
        let b = spectral::mixing_rate(&map, m + 2).unwrap();
        let nu_next = spectral::leading_eigenvalue(&map, (m + 2) as f64).unwrap();
        if a.subleading.value.norm() > nu_next * (1.0 + 1e-9) {
            prop_assert!((a.subleading.value.norm() - b.subleading.value.norm()).abs() <= 1e-10);
        }
        prop_assert!((a.leading - 1.0).abs() <= 1e-10);
    }
}
