use std::f64::consts::PI;

use ltsharp::corpus::corpus;
use ltsharp::linalg::c;
use ltsharp::scattering::{default_kappa_max, log_log_slope};
use ltsharp::sumrules::{dispersion_check, logdet_remainders, sample_log_det_to, sum_rule_report_from};
use ltsharp::{
    bound_states_from_det_a, build_potential, build_potential_with_spacing, integral_ij, sum_rule_report, Envelope,
    Error, PotentialSpec,
};

#[test]
fn zeroth_moment_is_nonnegative_and_balances_on_every_corpus_potential() {
    for e in corpus() {
        let v = build_potential(&e.spec).unwrap();
        let i0 = integral_ij(&v, 0, 1e-6).unwrap();
        assert!(i0 >= 0.0, "{}: I0 = {i0}", e.name);
        let states = bound_states_from_det_a(&v, default_kappa_max(&v), 1e-12).unwrap();
        let lhs = 0.25 * v.integral_trace();
        let rhs = i0 / (2.0 * PI) - states.moment(1);
        assert!((lhs - rhs).abs() <= 1e-3 * lhs.abs(), "{}: {lhs} vs {rhs}", e.name);
    }
}

#[test]
fn higher_moments_need_smoothness() {
    let v = build_potential(&PotentialSpec::square_well(4.0, 1.0)).unwrap();
    for j in [2, 4] {
        assert!(matches!(integral_ij(&v, j, 1e-6), Err(Error::Precondition(_))));
    }
}

#[test]
fn second_rule_scales_quadratically() {
    let base = PotentialSpec::truncated_gaussian(3.0, 0.4, 1.5);
    let r1 = sum_rule_report(&build_potential(&base).unwrap()).unwrap();
    let r2 = sum_rule_report(&build_potential(&base.scaled(1.7)).unwrap()).unwrap();
    let expected = 1.7f64.powi(2) * r1.lhs2;
    assert!((r2.lhs2 - expected).abs() <= 1e-10 * expected);
    assert!((r2.rhs2 - expected).abs() <= 1e-3 * expected, "{} vs {expected}", r2.rhs2);
}

#[test]
fn residuals_shrink_under_joint_refinement() {
    let spec = PotentialSpec::random_hermitian(2, 7, 3.0, Envelope::default());
    let levels = [(0.004, 4.0), (0.002, 8.0), (0.001, 16.0)];
    let mut worst = Vec::new();
    for (h, k_max) in levels {
        let v = build_potential_with_spacing(&spec, h).unwrap();
        let states = bound_states_from_det_a(&v, default_kappa_max(&v), 1e-12).unwrap();
        let samples = sample_log_det_to(&v, k_max).unwrap();
        let r = sum_rule_report_from(&v, &samples, &states.kappas, &states.multiplicities).unwrap();
        worst.push(r.max_residual());
    }
    let inv_h: Vec<f64> = levels.iter().map(|l| 1.0 / l.0).collect();
    let slope = -log_log_slope(&inv_h, &worst);
    assert!(slope >= 1.0, "residuals {worst:?}, order {slope}");
}

#[test]
fn truncated_series_decays_at_its_own_order() {
    let v = build_potential(&PotentialSpec::bump(4.0, 1.0)).unwrap();
    let one = logdet_remainders(&v, &[8.0, 16.0, 32.0], 1).unwrap();
    assert!((-3.5..=-2.5).contains(&one.slope), "{}", one.slope);
    let two = logdet_remainders(&v, &[8.0, 16.0, 32.0], 2).unwrap();
    assert!(two.slope < one.slope - 1.0);
}

#[test]
fn series_check_rejects_bad_input() {
    let v = build_potential(&PotentialSpec::bump(4.0, 1.0)).unwrap();
    assert!(logdet_remainders(&v, &[2.0, 16.0], 3).is_err());
    assert!(logdet_remainders(&v, &[16.0, 8.0], 3).is_err());
    let well = build_potential(&PotentialSpec::square_well(4.0, 1.0)).unwrap();
    assert!(matches!(logdet_remainders(&well, &[8.0, 16.0], 3), Err(Error::Precondition(_))));
}

#[test]
fn dispersion_formula_off_the_imaginary_axis() {
    let v = build_potential(&PotentialSpec::random_hermitian(2, 7, 3.0, Envelope::default())).unwrap();
    let check = dispersion_check(&v, c(0.8, 1.5)).unwrap();
    assert!(check.residual <= 1e-3, "{check:?}");
}
