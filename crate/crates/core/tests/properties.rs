use approx::assert_relative_eq;
use idgauss::criteria::{find_signature, is_id_square, triple_necessary, triple_sufficient, IdVerdict, Signature};
use idgauss::green::decompose;
use idgauss::matrix::{cholesky, det, invert, spectral_radius};
use idgauss::oracle::laplace_exact;
use idgauss::zoo::{brownian_cov, fbm_cov, random_green, scale_conjugate, sheet_cov, GridSpec1D, GridSpec2D};
use idgauss::{Matrix, Tolerances};
use proptest::prelude::*;

fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::from_fn(n, |i, j| v[i * n + j]))
    })
}

fn pd(max_n: usize) -> impl Strategy<Value = Matrix> {
    square(max_n).prop_map(|a| {
        let n = a.n();
        a.mul(&a.transpose()).sub(&Matrix::identity(n).scale(-0.2)).symmetrize()
    })
}

fn grid(max_n: usize) -> impl Strategy<Value = GridSpec1D> {
    prop::collection::btree_set(1u32..1000, 1..=max_n)
        .prop_map(|s| GridSpec1D::new(s.into_iter().map(|k| f64::from(k) / 100.0).collect()).unwrap())
}

fn signs(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n)
}

fn leading_minor(g: &Matrix, k: usize) -> f64 {
    det(&Matrix::from_fn(k, |i, j| g[(i, j)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn double_inverse_is_identity(g in pd(7)) {
        let tol = Tolerances::default();
        let back = invert(&invert(&g, &tol).unwrap(), &tol).unwrap();
        prop_assert!(back.max_diff(&g) <= 1e-8 * g.max_abs());
    }

    #[test]
    fn cholesky_iff_leading_minors_positive(a in square(5)) {
        let g = a.symmetrize();
        let minors_positive = (1..=g.n()).all(|k| leading_minor(&g, k) > 1e-6);
        let minors_negative = (1..=g.n()).any(|k| leading_minor(&g, k) < -1e-6);
        let ok = cholesky(&g, &Tolerances::default()).is_ok();
        if minors_positive {
            prop_assert!(ok);
        }
        if minors_negative {
            prop_assert!(!ok);
        }
    }

    #[test]
    fn spectral_radius_within_gershgorin(a in square(6)) {
        let b = a.map(f64::abs);
        let r = spectral_radius(&b, 10_000, 1e-12).unwrap();
        prop_assert!(r.lower <= r.estimate + 1e-9);
        prop_assert!(r.estimate <= r.upper + 1e-9);
        prop_assert!(r.estimate <= r.gershgorin * (1.0 + 1e-12));
    }

    #[test]
    fn verdict_invariant_under_signature_and_scaling(
        g in pd(6),
        s in signs(6),
        d in prop::collection::vec(0.1f64..10.0, 6),
    ) {
        let n = g.n();
        let tol = Tolerances::default();
        let s = Signature::from_signs(s[..n].to_vec());
        let h = s.conjugate(&scale_conjugate(&g, &d[..n]).unwrap());
        prop_assert_eq!(
            is_id_square(&g, &tol).unwrap().is_id(),
            is_id_square(&h, &tol).unwrap().is_id()
        );
    }

    #[test]
    fn conjugated_green_function_is_id(n in 1usize..9, seed in any::<u64>(), s in signs(8)) {
        let tol = Tolerances::default();
        let g = random_green(n, seed, true).unwrap().1;
        let s = Signature::from_signs(s[..n].to_vec());
        let h = s.conjugate(&g);
        match is_id_square(&h, &tol).unwrap() {
            IdVerdict::Id { signature, .. } => {
                prop_assert!(signature.conjugate(&h).as_slice().iter().all(|&x| x >= 0.0));
            }
            v => prop_assert!(false, "{:?}", v),
        }
    }

    #[test]
    fn signature_matches_exhaustive_search(g in pd(6)) {
        let tol = Tolerances::default();
        let a = invert(&g, &tol).unwrap();
        let n = g.n();
        let eps = tol.zero_threshold(&a);
        let exists = (0u32..1 << n).any(|bits| {
            let s: Vec<f64> = (0..n).map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            (0..n).all(|i| (0..n).all(|j| i == j || s[i] * s[j] * a[(i, j)] <= eps))
        });
        prop_assert_eq!(find_signature(&g, &tol).is_ok(), exists);
    }

    #[test]
    fn triple_sufficient_implies_id_implies_necessary(g in pd(3).prop_filter("3x3", |g| g.n() == 3)) {
        let tol = Tolerances::default();
        let id = is_id_square(&g, &tol).unwrap().is_id();
        if triple_sufficient(&g, &tol) {
            prop_assert!(id);
        }
        if id {
            prop_assert!(triple_necessary(&g, &tol));
        }
    }

    #[test]
    fn green_matches_neumann_series(n in 1usize..8, seed in any::<u64>()) {
        let (chain, g) = random_green(n, seed, false).unwrap();
        let mut sum = Matrix::identity(n);
        let mut power = Matrix::identity(n);
        for _ in 0..5000 {
            power = power.mul(&chain.t);
            sum = sum.sub(&power.scale(-1.0));
            if power.max_abs() < 1e-16 {
                break;
            }
        }
        prop_assert!(sum.max_diff(&g) <= 1e-9 * g.max_abs());
    }

    #[test]
    fn decomposition_reconstructs(gr in grid(10), beta in 0.05f64..=1.0) {
        let g = fbm_cov(&gr, beta).unwrap();
        let dec = decompose(&g, &Tolerances::default()).unwrap();
        prop_assert!(dec.reconstruction_error <= 1e-10);
        prop_assert!(dec.kappa.iter().all(|&k| k > 0.0));
    }

    #[test]
    fn laplace_squared_times_det_is_one(g in pd(6), t in prop::collection::vec(0.0f64..3.0, 6)) {
        let n = g.n();
        let t = &t[..n];
        let psi = laplace_exact(&g, t).unwrap();
        let d = det(&Matrix::identity(n).sub(&g.diag_scale(&vec![1.0; n], t).scale(-1.0)));
        assert_relative_eq!(psi * psi * d, 1.0, epsilon = 1e-10);
        prop_assert!(psi > 0.0 && psi <= 1.0);
    }

    #[test]
    fn laplace_decreases_in_each_coordinate(
        g in pd(5),
        t in prop::collection::vec(0.0f64..3.0, 5),
        k in 0usize..5,
        bump in 0.01f64..2.0,
    ) {
        let n = g.n();
        let t = t[..n].to_vec();
        let mut t2 = t.clone();
        t2[k % n] += bump;
        prop_assert!(laplace_exact(&g, &t2).unwrap() <= laplace_exact(&g, &t).unwrap() + 1e-15);
    }

    #[test]
    fn fbm_at_one_is_twice_brownian(gr in grid(12)) {
        let f = fbm_cov(&gr, 1.0).unwrap();
        let b = brownian_cov(&gr).unwrap();
        prop_assert!(f.max_diff(&b.scale(2.0)) <= 1e-12 * f.max_abs());
    }

    #[test]
    fn sheet_on_horizontal_line_is_scaled_brownian(gr in grid(10), s0 in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = gr.points().iter().map(|&x| (x, s0)).collect();
        let g = sheet_cov(&GridSpec2D::new(pts).unwrap());
        let b = brownian_cov(&gr).unwrap().scale(s0);
        prop_assert!(g.max_diff(&b) <= 1e-12 * g.max_abs());
    }
}

#[test]
fn sheet_counterexample_golden() {
    let golden: serde_json::Value = serde_json::from_str(include_str!("golden/sheet_counterexample.json")).unwrap();
    let (grid, g) = idgauss::zoo::sheet_counterexample();
    let pts: Vec<(f64, f64)> = golden["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    assert_eq!(grid.points(), &pts[..]);
    let rows: Vec<Vec<f64>> = serde_json::from_value(golden["covariance"].clone()).unwrap();
    assert_eq!(g, Matrix::from_rows(&rows).unwrap());
    assert_relative_eq!(det(&g), golden["det"].as_f64().unwrap(), max_relative = 1e-12);
    let a = invert(&g, &Tolerances::default()).unwrap();
    let cofactor = golden["cofactor_01"].as_f64().unwrap();
    assert_relative_eq!(a[(0, 1)], cofactor / det(&g), max_relative = 1e-12);
    assert_relative_eq!(a[(0, 1)], golden["inverse_01"].as_f64().unwrap(), max_relative = 1e-12);
}
