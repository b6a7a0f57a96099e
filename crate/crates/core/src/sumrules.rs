//! Trace identities: the integrals `I_j = ∫ z^j ln|det A(z)| dz`, the first
//! three sum rules, the large-κ expansion of `ln det A(iκ)` and a one-point
//! check of the dispersion formula.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c};
use crate::potential::{MatrixPotential, Smoothness};
use crate::quadrature::GaussLegendre;
use crate::scattering::{
    self, bound_states_from_det_a, default_kappa_max, log_log_slope, resonance_screen, BoundStateSet,
};
use crate::spectrum::fd_eigensolve_1d_auto;

/// Lower end of the sampled `|z|` range; below it `ln|det A|` is fitted by `a + b ln|z|`.
pub const Z_EPS: f64 = 1e-3;
/// Cut-off schedule for the real-axis integrals.
pub const K_SCHEDULE: [f64; 4] = [16.0, 32.0, 64.0, 128.0];
/// Default relative tolerance on the last cut-off increment.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

const GL_ORDER: usize = 12;
const LOG_PANELS: usize = 4;

/// `ln|det A(-z)| = ½ ln det(I + B(z) B*(z))` for real `z`: exact by the
/// unitarity relation and only second order in the error of `B`.
pub fn mirrored_log_abs_det(v: &MatrixPotential, z: f64) -> Result<f64> {
    let (_, b) = scattering::scattering_matrices(v, c(z, 0.0))?;
    let id = linalg::identity(v.dim());
    let d = (&id + &b * b.adjoint()).determinant().re;
    Ok(0.5 * d.ln())
}

/// Samples of `L(z) = ln|det A(z)|` on the real axis arranged for integration
/// against smooth weights.
#[derive(Debug, Clone)]
pub struct LogDetSamples {
    /// `(z, weight, L(z))` on `ε <= |z| <= k_max`.
    nodes: Vec<(f64, f64, f64)>,
    /// `L(s t) ≈ a + b ln t` on `0 < t < ε` for `s = +1` and `s = -1`.
    fits: [(f64, f64); 2],
    k_max: f64,
    evaluations: usize,
}

impl LogDetSamples {
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// `∫_{-K}^{K} g(z) L(z) dz`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let body: f64 = self.nodes.iter().map(|&(z, w, l)| w * g(z) * l).sum();
        // (0, ε): z = s e^u, u from ln ε - 40 up to ln ε
        let gl = GaussLegendre::new(GL_ORDER);
        let top = Z_EPS.ln();
        let mut near = 0.0;
        for (side, &(a, b)) in [1.0, -1.0].iter().zip(&self.fits) {
            for p in 0..8 {
                let (u0, u1) = (top - 5.0 * (p + 1) as f64, top - 5.0 * p as f64);
                near += gl.integrate(u0, u1, |u| {
                    let t = u.exp();
                    t * g(side * t) * (a + b * u)
                });
            }
        }
        body + near
    }

    /// `∫ z^j L(z) dz`. For `j = 0` the part beyond the cut-off is estimated
    /// from the last octave, exact for the `L ~ C/z⁴` tail of a potential
    /// with jumps (`B ~ z⁻²`); smoother potentials decay faster.
    pub fn moment(&self, j: i32) -> f64 {
        let body = self.integrate(|z| z.powi(j));
        if j != 0 {
            return body;
        }
        let tail: f64 = self
            .nodes
            .iter()
            .filter(|&&(z, _, _)| z.abs() >= 0.5 * self.k_max)
            .map(|&(_, w, l)| w * l)
            .sum();
        // ∫_K^∞ z⁻⁴ = (1/7) ∫_{K/2}^K z⁻⁴
        body + tail / 7.0
    }
}

fn eval_mirrored(v: &MatrixPotential, zs: &[f64]) -> Result<Vec<f64>> {
    // L(z) = ln|det A(-(-z))| is read from B(-z)
    zs.par_iter().map(|&z| mirrored_log_abs_det(v, -z)).collect()
}

fn weighted_nodes(panels: &[(f64, f64)], log_scale: bool) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(GL_ORDER);
    let mut out = Vec::new();
    for &(a, b) in panels {
        for (x, w) in gl.mapped(a, b) {
            if log_scale {
                let z = x.exp();
                out.push((z, w * z));
            } else {
                out.push((x, w));
            }
        }
    }
    out
}

fn symmetric(nodes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    nodes
        .iter()
        .flat_map(|&(z, w)| [(z, w), (-z, w)])
        .collect()
}

fn unit_panels(a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = (b - a).round() as usize;
    (0..n).map(|i| (a + i as f64, a + (i + 1) as f64)).collect()
}

fn evaluate(v: &MatrixPotential, grid: &[(f64, f64)]) -> Result<Vec<(f64, f64, f64)>> {
    let zs: Vec<f64> = grid.iter().map(|p| p.0).collect();
    let vals = eval_mirrored(v, &zs)?;
    Ok(grid.iter().zip(&vals).map(|(&(z, w), &l)| (z, w, l)).collect())
}

/// Samples `L` on `|z| <= k_max` for an integer cut-off `k_max >= 1`.
pub fn sample_log_det_to(v: &MatrixPotential, k_max: f64) -> Result<LogDetSamples> {
    if !(k_max >= 1.0 && k_max.fract() == 0.0) {
        return Err(Error::InvalidInput(format!("k_max must be an integer >= 1 (got {k_max})")));
    }
    let eps_pts = [Z_EPS, -Z_EPS, 2.0 * Z_EPS, -2.0 * Z_EPS];
    let e = eval_mirrored(v, &eps_pts)?;
    let ln2 = 2f64.ln();
    let fit = |l1: f64, l2: f64| {
        let b = (l2 - l1) / ln2;
        (l1 - b * Z_EPS.ln(), b)
    };
    let lo = Z_EPS.ln();
    let log_panels: Vec<(f64, f64)> = (0..LOG_PANELS)
        .map(|p| {
            let t0 = lo * (1.0 - p as f64 / LOG_PANELS as f64);
            let t1 = lo * (1.0 - (p + 1) as f64 / LOG_PANELS as f64);
            (t0, t1)
        })
        .collect();
    let mut grid = symmetric(&weighted_nodes(&log_panels, true));
    grid.extend(symmetric(&weighted_nodes(&unit_panels(1.0, k_max), false)));
    Ok(LogDetSamples {
        nodes: evaluate(v, &grid)?,
        fits: [fit(e[0], e[2]), fit(e[1], e[3])],
        k_max,
        evaluations: eps_pts.len() + grid.len(),
    })
}

/// Samples `L` up to the first cut-off in [`K_SCHEDULE`] and extends the
/// range while any of the `monitored` moments changes by more than `rel_tol`.
pub fn sample_log_det(v: &MatrixPotential, rel_tol: f64, monitored: &[i32]) -> Result<LogDetSamples> {
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(Error::InvalidInput(format!("rel_tol must be positive (got {rel_tol})")));
    }
    let moments = |s: &LogDetSamples| monitored.iter().map(|&j| s.moment(j)).collect::<Vec<_>>();
    let mut samples = sample_log_det_to(v, K_SCHEDULE[0])?;
    let mut current = moments(&samples);
    for w in K_SCHEDULE.windows(2) {
        let ext = symmetric(&weighted_nodes(&unit_panels(w[0], w[1]), false));
        samples.nodes.extend(evaluate(v, &ext)?);
        samples.k_max = w[1];
        samples.evaluations += ext.len();
        let next = moments(&samples);
        let converged = current
            .iter()
            .zip(&next)
            .all(|(a, b)| (b - a).abs() <= rel_tol * b.abs().max(1e-300));
        if converged {
            return Ok(samples);
        }
        current = next;
    }
    Err(Error::Convergence(format!(
        "ln|det A| moments still changing at K = {}",
        K_SCHEDULE[K_SCHEDULE.len() - 1]
    )))
}

fn check_sum_rule_input(v: &MatrixPotential, j: u32) -> Result<()> {
    if !matches!(j, 0 | 2 | 4) {
        return Err(Error::InvalidInput(format!("j must be 0, 2 or 4 (got {j})")));
    }
    if j >= 2 && v.smoothness() != Smoothness::Smooth {
        return Err(Error::Precondition(
            "moments with j >= 2 need a smooth potential: the k^-2 tail of B for \
             piecewise-constant potentials is not integrable against z^4"
                .into(),
        ));
    }
    resonance_screen(v)
}

/// `I_j = ∫ z^j ln|det A(z)| dz` for `j ∈ {0, 2, 4}`.
pub fn integral_ij(v: &MatrixPotential, j: u32, rel_tol: f64) -> Result<f64> {
    check_sum_rule_input(v, j)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    Ok(sample_log_det(v, rel_tol, &[j as i32])?.moment(j as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRuleReport {
    pub i0: f64,
    pub i2: f64,
    pub i4: f64,
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
    pub lhs3: f64,
    pub rhs3: f64,
    pub residuals: [f64; 3],
    pub k_max_used: f64,
    pub quadrature_points: usize,
    pub kappas: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

impl SumRuleReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("{\n");
        let fields = [
            ("I0", self.i0),
            ("I2", self.i2),
            ("I4", self.i4),
            ("lhs1", self.lhs1),
            ("rhs1", self.rhs1),
            ("lhs2", self.lhs2),
            ("rhs2", self.rhs2),
            ("lhs3", self.lhs3),
            ("rhs3", self.rhs3),
            ("residual1", self.residuals[0]),
            ("residual2", self.residuals[1]),
            ("residual3", self.residuals[2]),
            ("k_max_used", self.k_max_used),
        ];
        for (name, value) in fields {
            let _ = writeln!(out, "  \"{name}\": {value:?},");
        }
        let _ = writeln!(out, "  \"quadrature_points\": {},", self.quadrature_points);
        let _ = writeln!(out, "  \"kappas\": {:?},", self.kappas);
        let _ = writeln!(out, "  \"multiplicities\": {:?}", self.multiplicities);
        out.push_str("}\n");
        out
    }

    pub fn to_csv(&self) -> String {
        format!(
            "I0,I2,I4,lhs1,rhs1,lhs2,rhs2,lhs3,rhs3,residual1,residual2,residual3,k_max_used,quadrature_points\n\
             {:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{}\n",
            self.i0,
            self.i2,
            self.i4,
            self.lhs1,
            self.rhs1,
            self.lhs2,
            self.rhs2,
            self.lhs3,
            self.rhs3,
            self.residuals[0],
            self.residuals[1],
            self.residuals[2],
            self.k_max_used,
            self.quadrature_points
        )
    }
}

/// Both sides of the three trace identities, with bound states from the
/// finite-difference solver.
pub fn sum_rule_report(v: &MatrixPotential) -> Result<SumRuleReport> {
    sum_rule_report_with(v, DEFAULT_REL_TOL)
}

pub fn sum_rule_report_with(v: &MatrixPotential, rel_tol: f64) -> Result<SumRuleReport> {
    check_sum_rule_input(v, 4)?;
    if v.is_zero() {
        return Ok(assemble_report(v, None, &[], &[]));
    }
    let samples = sample_log_det(v, rel_tol, &[0, 2, 4])?;
    let spectrum = fd_eigensolve_1d_auto(v)?;
    Ok(assemble_report(v, Some(&samples), &spectrum.kappas(), &spectrum.multiplicities))
}

/// Report from given samples of `ln|det A|` and bound states `(κ, m)`.
pub fn sum_rule_report_from(
    v: &MatrixPotential,
    samples: &LogDetSamples,
    kappas: &[f64],
    multiplicities: &[usize],
) -> Result<SumRuleReport> {
    check_sum_rule_input(v, 4)?;
    if kappas.len() != multiplicities.len() {
        return Err(Error::InvalidInput("one multiplicity per κ is required".into()));
    }
    Ok(assemble_report(v, Some(samples), kappas, multiplicities))
}

fn assemble_report(
    v: &MatrixPotential,
    samples: Option<&LogDetSamples>,
    kappas: &[f64],
    multiplicities: &[usize],
) -> SumRuleReport {
    let lhs1 = 0.25 * v.integral_trace();
    let lhs2 = 3.0 / 16.0 * v.integral_trace_sq();
    let lhs3 = 5.0 / 32.0 * v.integral_trace_cube() + 5.0 / 64.0 * v.integral_trace_derivative_sq();
    let (i0, i2, i4) = samples.map_or((0.0, 0.0, 0.0), |s| (s.moment(0), s.moment(2), s.moment(4)));
    let moment = |p: i32| -> f64 {
        kappas
            .iter()
            .zip(multiplicities)
            .map(|(k, &m)| m as f64 * k.powi(p))
            .sum()
    };
    let rhs1 = i0 / (2.0 * PI) - moment(1);
    let rhs2 = 3.0 * i2 / (2.0 * PI) + moment(3);
    let rhs3 = 5.0 * i4 / (2.0 * PI) - moment(5);
    let residuals = if samples.is_some() {
        [relative_gap(lhs1, rhs1), relative_gap(lhs2, rhs2), relative_gap(lhs3, rhs3)]
    } else {
        [0.0; 3]
    };
    SumRuleReport {
        i0,
        i2,
        i4,
        lhs1,
        rhs1,
        lhs2,
        rhs2,
        lhs3,
        rhs3,
        residuals,
        k_max_used: samples.map_or(0.0, |s| s.k_max()),
        quadrature_points: samples.map_or(0, |s| s.evaluations()),
        kappas: kappas.to_vec(),
        multiplicities: multiplicities.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub kappas: Vec<f64>,
    pub remainders: Vec<f64>,
    /// Log-log slope of `|r(κ)|`; `-inf` when the remainder vanishes.
    pub slope: f64,
}

/// Remainder of `ln det A(iκ)` after the first `terms` (1 to 3) terms of its
/// large-κ expansion.
pub fn logdet_remainders(v: &MatrixPotential, kappa_list: &[f64], terms: usize) -> Result<SeriesFit> {
    if v.smoothness() != Smoothness::Smooth {
        return Err(Error::Precondition(
            "the large-κ expansion of ln det A needs a C² potential".into(),
        ));
    }
    if !(1..=3).contains(&terms) {
        return Err(Error::InvalidInput(format!("terms must be 1, 2 or 3 (got {terms})")));
    }
    if kappa_list.len() < 2
        || kappa_list.windows(2).any(|w| w[1] <= w[0])
        || kappa_list[0] < 4.0
        || kappa_list[kappa_list.len() - 1] > 64.0
    {
        return Err(Error::InvalidInput(
            "kappa_list must be increasing, with at least two values in [4, 64]".into(),
        ));
    }
    let t1 = v.integral_trace();
    let t2 = v.integral_trace_sq();
    let t3 = 2.0 * v.integral_trace_cube() + v.integral_trace_derivative_sq();
    let remainders: Vec<f64> = kappa_list
        .par_iter()
        .map(|&kappa| {
            let det = scattering::det_a(v, c(0.0, kappa))?;
            // at k = iκ: 1/(2ik) = -1/(2κ)
            let x = -1.0 / (2.0 * kappa);
            let mut r = det.re.ln() + x * t1;
            if terms >= 2 {
                r -= x.powi(3) * t2;
            }
            if terms >= 3 {
                r += x.powi(5) * t3;
            }
            Ok(r.abs())
        })
        .collect::<Result<_>>()?;
    let slope = if remainders.contains(&0.0) {
        f64::NEG_INFINITY
    } else {
        log_log_slope(kappa_list, &remainders)
    };
    Ok(SeriesFit {
        kappas: kappa_list.to_vec(),
        remainders,
        slope,
    })
}

/// Fitted decay order of the remainder after three terms.
pub fn logdet_series_check(v: &MatrixPotential, kappa_list: &[f64]) -> Result<SeriesFit> {
    logdet_remainders(v, kappa_list, 3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCheck {
    pub k: Complex64,
    pub det_a: Complex64,
    pub reconstructed: Complex64,
    pub residual: f64,
}

/// `det A(k)` against `exp` of the Cauchy integral of `ln|det A|` plus the
/// bound-state factors, at a point `k` of the upper half-plane.
pub fn dispersion_check(v: &MatrixPotential, k: Complex64) -> Result<DispersionCheck> {
    if k.im <= 0.0 {
        return Err(Error::InvalidInput(format!("k must lie in the upper half-plane (got {k})")));
    }
    resonance_screen(v)?;
    let det = scattering::det_a(v, k)?;
    if v.is_zero() {
        return Ok(DispersionCheck {
            k,
            det_a: det,
            reconstructed: c(1.0, 0.0),
            residual: (det - 1.0).norm(),
        });
    }
    let samples = sample_log_det(v, DEFAULT_REL_TOL, &[0])?;
    // 1/(z - k) = (z - k̄)/|z - k|², split into real and imaginary weights
    let re = samples.integrate(|z| (z - k.re) / ((z - k.re).powi(2) + k.im * k.im));
    let im = samples.integrate(|z| k.im / ((z - k.re).powi(2) + k.im * k.im));
    let cauchy = c(re, im) / c(0.0, PI);
    let states: BoundStateSet = bound_states_from_det_a(v, default_kappa_max(v), 1e-12)?;
    let mut log_rhs = cauchy;
    for (&kappa, &m) in states.kappas.iter().zip(&states.multiplicities) {
        let ratio = (k - c(0.0, kappa)) / (k + c(0.0, kappa));
        log_rhs += ratio.ln() * m as f64;
    }
    let reconstructed = log_rhs.exp();
    Ok(DispersionCheck {
        k,
        det_a: det,
        reconstructed,
        residual: (det - reconstructed).norm() / det.norm().max(1e-300),
    })
}
