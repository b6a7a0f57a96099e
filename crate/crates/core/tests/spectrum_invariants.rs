use ltsharp::spectrum::{fd_eigensolve_1d_auto, fd_eigensolve_1d_spacing};
use ltsharp::{build_potential, fd_eigensolve_2d, Box2d, Potential2dSpec, PotentialSpec};
use proptest::prelude::*;

/// Even and odd bound states of a square well of depth `d` and width `w`
/// from the matching conditions, by bisection.
fn square_well_kappas(d: f64, w: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let h = 0.5 * w;
    // f(κ) = 0 on each branch, with q = sqrt(d - κ²)
    let even = |kappa: f64| {
        let q = (d - kappa * kappa).sqrt();
        q * (q * h).sin() - kappa * (q * h).cos()
    };
    let odd = |kappa: f64| {
        let q = (d - kappa * kappa).sqrt();
        q * (q * h).cos() + kappa * (q * h).sin()
    };
    let n = 20_000;
    for f in [&even as &dyn Fn(f64) -> f64, &odd] {
        for i in 0..n {
            let (mut a, mut b) = (d.sqrt() * i as f64 / n as f64, d.sqrt() * (i + 1) as f64 / n as f64);
            if a == 0.0 {
                a = 1e-12;
            }
            if f(a) * f(b) < 0.0 {
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if f(a) * f(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

#[test]
fn square_well_levels_match_matching_conditions() {
    for (d, w) in [(4.0, 1.0), (0.5, 1.0), (20.0, 1.5)] {
        let v = build_potential(&PotentialSpec::square_well(d, w)).unwrap();
        let s = fd_eigensolve_1d_auto(&v).unwrap();
        let oracle = square_well_kappas(d, w);
        let got = s.kappas();
        assert_eq!(got.len(), oracle.len(), "depth {d}");
        for (a, b) in got.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-5, "depth {d}: {a} vs {b}");
        }
    }
}

#[test]
fn richardson_slope_is_second_order_on_wells() {
    for spec in [PotentialSpec::square_well(4.0, 1.0), PotentialSpec::square_well(20.0, 1.5)] {
        let v = build_potential(&spec).unwrap();
        let a = fd_eigensolve_1d_spacing(&v, 6.0, 0.02).unwrap();
        let b = fd_eigensolve_1d_spacing(&v, 6.0, 0.01).unwrap();
        for i in 0..a.len() {
            let (l1, l2, l4) = (a.coarse_eigenvalues[i], a.eigenvalues[i], b.eigenvalues[i]);
            let slope = ((l1 - l2) / (l2 - l4)).log2();
            assert!((1.8..=2.2).contains(&slope), "{spec:?} level {i}: slope {slope}");
        }
    }
}

#[test]
fn enlarging_the_box_never_raises_levels() {
    for spec in [PotentialSpec::square_well(0.5, 1.0), PotentialSpec::bump(4.0, 1.0)] {
        let v = build_potential(&spec).unwrap();
        let kappa_min = *fd_eigensolve_1d_auto(&v).unwrap().kappas().last().unwrap();
        let mut previous: Option<Vec<f64>> = None;
        for factor in [4.0, 6.0, 8.0] {
            let s = fd_eigensolve_1d_spacing(&v, factor / kappa_min, 0.01).unwrap();
            let levels = s.expanded();
            if let Some(prev) = &previous {
                assert!(levels.len() >= prev.len());
                for (new, old) in levels.iter().zip(prev) {
                    assert!(*new <= *old + 1e-12, "{spec:?}: {new} > {old}");
                }
            }
            previous = Some(levels);
        }
    }
}

#[test]
fn separable_levels_are_sums_of_one_dimensional_levels() {
    // on a square box with Dirichlet walls, -Δ + w(x1) + w(x2) separates
    let w = PotentialSpec::bump(6.0, 1.0);
    let v2 = Potential2dSpec::separable(w.clone(), w.clone());
    let bx = Box2d::square(2.0);
    let s2 = fd_eigensolve_2d(&v2, &bx, 41).unwrap();
    // one-dimensional Dirichlet problem on [-2, 2] with the same nodes
    let v1 = build_potential(&w).unwrap();
    let s1 = fd_eigensolve_1d_spacing(&v1, 1.0, 0.1).unwrap();
    let mu = s1.eigenvalues[0];
    assert!((s2.eigenvalues[0] - 2.0 * mu).abs() <= 1e-8 * mu.abs(), "{} vs {}", s2.eigenvalues[0], 2.0 * mu);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn deeper_wells_have_lower_ground_states(d in 1.0f64..10.0, extra in 0.1f64..3.0) {
        let a = fd_eigensolve_1d_auto(&build_potential(&PotentialSpec::square_well(d, 1.0)).unwrap()).unwrap();
        let b = fd_eigensolve_1d_auto(&build_potential(&PotentialSpec::square_well(d + extra, 1.0)).unwrap()).unwrap();
        prop_assert!(b.eigenvalues[0] < a.eigenvalues[0]);
        prop_assert!(b.total_multiplicity() >= a.total_multiplicity());
    }
}
