use ltsharp::corpus::corpus;
use ltsharp::jost::{jost_solve, DEFAULT_TOL};
use ltsharp::linalg::{self, c, CMat};
use ltsharp::scattering::{det_a, scattering_matrices};
use ltsharp::{build_potential, build_potential_with_spacing, scattering_scan, Direction, Envelope, PotentialSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn max_relation_residual(spec: &PotentialSpec, h: f64) -> f64 {
    let v = build_potential_with_spacing(spec, h).unwrap();
    let ks: Vec<_> = (0..16).map(|i| c(0.25 + 0.25 * i as f64, 0.0)).collect();
    let data = scattering_scan(&v, &ks).unwrap();
    assert_eq!(data.failures().count(), 0);
    let r = data.max_residuals();
    r.d.max(r.d1).max(r.e)
}

#[test]
fn relation_residuals_converge_at_least_quadratically() {
    for spec in [
        PotentialSpec::bump(4.0, 1.0),
        PotentialSpec::random_hermitian(3, 11, 3.0, Envelope::default()),
    ] {
        let r: Vec<f64> = [0.01, 0.005, 0.0025].iter().map(|&h| max_relation_residual(&spec, h)).collect();
        for w in r.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 2.0, "{spec:?}: residuals {r:?}");
        }
    }
}

#[test]
fn wronskian_is_constant_and_equals_minus_2ik_b() {
    let v = build_potential(&PotentialSpec::random_hermitian(2, 7, 3.0, Envelope::default())).unwrap();
    for k in [0.7, 3.0, 11.0] {
        let kc = c(k, 0.0);
        let f = jost_solve(&v, kc, Direction::FromPlusInfinity, DEFAULT_TOL).unwrap();
        let g = jost_solve(&v, kc, Direction::FromMinusInfinity, DEFAULT_TOL).unwrap();
        assert_eq!(f.nodes(), g.nodes());
        let w: Vec<CMat> = (0..f.len())
            .map(|i| g.value(i).adjoint() * f.derivative(i) - g.derivative(i).adjoint() * f.value(i))
            .collect();
        let scale = w.iter().map(linalg::max_abs).fold(1.0, f64::max);
        let drift = w.iter().map(|m| linalg::max_abs(&(m - &w[0]))).fold(0.0, f64::max);
        assert!(drift <= 100.0 * DEFAULT_TOL * scale, "k = {k}: drift {drift:.3e}");
        let (_, b) = scattering_matrices(&v, kc).unwrap();
        let expected = b.scale(-2.0 * k).map(|z| z * Complex64::i());
        assert!(linalg::max_abs(&(&w[0] - expected)) <= 1e-6 * scale);
    }
}

#[test]
fn det_a_modulus_bounded_below_on_real_axis() {
    let ks: Vec<_> = (0..40).map(|i| c(0.25 + 0.8 * i as f64, 0.0)).collect();
    for e in corpus() {
        let v = build_potential(&e.spec).unwrap();
        let data = scattering_scan(&v, &ks).unwrap();
        for p in data.successes() {
            let r = p.residuals.unwrap();
            assert!(p.det_a.norm() >= 1.0 - r.e - r.d - 1e-12, "{}: |det A({})| = {}", e.name, p.k, p.det_a.norm());
        }
    }
}

#[test]
fn a_is_real_on_imaginary_axis_for_real_potentials() {
    for spec in [
        PotentialSpec::bump(4.0, 1.0),
        PotentialSpec::square_well(4.0, 1.0).times_identity(3),
        PotentialSpec::truncated_gaussian(3.0, 0.4, 1.5),
    ] {
        let v = build_potential(&spec).unwrap();
        for kappa in [0.3, 1.0, 2.5, 6.0] {
            let (a, _) = scattering_matrices(&v, c(0.0, kappa)).unwrap();
            let im = a.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            assert!(im <= 1e-10, "{spec:?} at iκ = {kappa}: Im A = {im:.3e}");
        }
    }
}

#[test]
fn large_k_law_has_stable_constant() {
    let v = build_potential(&PotentialSpec::random_hermitian(2, 7, 3.0, Envelope::default())).unwrap();
    let int_v = v.integral_matrix();
    let id = linalg::identity(2);
    let consts: Vec<f64> = [8.0, 16.0, 32.0]
        .iter()
        .map(|&kappa| {
            let k = c(0.0, kappa);
            let (a, _) = scattering_matrices(&v, k).unwrap();
            let first = int_v.map(|z| z / (k * 2.0 * Complex64::i()));
            linalg::singular_values(&((&a - &id) + first))[0] * kappa * kappa
        })
        .collect();
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi / lo <= 1.5, "constants {consts:?}");
}

#[test]
fn det_a_is_one_for_the_free_case() {
    let v = build_potential(&PotentialSpec::zero(3)).unwrap();
    for k in [c(0.5, 0.0), c(-2.0, 0.0), c(1.0, 1.0)] {
        assert!((det_a(&v, k).unwrap() - 1.0).norm() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn relations_hold_for_random_potentials(seed in 0u64..10_000, amp in 0.2f64..3.0, k in 0.3f64..10.0) {
        let v = build_potential(&PotentialSpec::random_hermitian(2, seed, amp, Envelope::default())).unwrap();
        let data = scattering_scan(&v, &[c(k, 0.0)]).unwrap();
        let r = data.max_residuals();
        prop_assert!(r.d.max(r.d1).max(r.e) <= 1e-6, "{:?}", r);
    }

    #[test]
    fn free_solution_is_plane_wave(kr in -20.0f64..20.0, ki in 0.0f64..3.0) {
        prop_assume!((kr * kr + ki * ki).sqrt() >= 1e-2);
        let v = build_potential(&PotentialSpec::zero(2)).unwrap();
        let k = c(kr, ki);
        let f = jost_solve(&v, k, Direction::FromPlusInfinity, DEFAULT_TOL).unwrap();
        let steps = f.len() as f64;
        for (i, &x) in f.nodes().iter().enumerate() {
            let exact = (Complex64::i() * k * x).exp();
            let got = f.value(i);
            let err = (got[(0, 0)] - exact).norm().max(got[(0, 1)].norm());
            prop_assert!(err <= DEFAULT_TOL * steps * exact.norm().max(1.0));
        }
    }
}
