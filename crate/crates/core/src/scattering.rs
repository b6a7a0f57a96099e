//! Scattering matrices `A(k)`, `B(k)` and bound states from zeros of `det A(iκ)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{self, check_k, jost_solve, Direction, JostSolution};
use crate::linalg::{self, c, CMat};
use crate::potential::{MatrixPotential, Smoothness};

/// Tolerance used for the Jost solves behind scattering quantities.
pub const JOST_TOL: f64 = jost::DEFAULT_TOL;

/// Relative mismatch allowed by the two-point consistency check of [`extract_ab`].
const CONSISTENCY_TOL: f64 = 1e-6;

/// Splits `F = e^{ikx} A + e^{-ikx} B` at the node `x_eval <= x_min`.
pub fn extract_ab(f: &JostSolution, x_eval: f64) -> Result<(CMat, CMat)> {
    if f.direction() != Direction::FromPlusInfinity {
        return Err(Error::InvalidInput(
            "A and B are read off the right Jost solution F".into(),
        ));
    }
    let (x_min, _) = f.support();
    if x_eval > x_min {
        return Err(Error::InvalidInput(format!(
            "x_eval = {x_eval} lies inside the support (x_min = {x_min})"
        )));
    }
    let i = f.node_index(x_eval).ok_or_else(|| {
        Error::InvalidInput(format!("x_eval = {x_eval} is not a grid node"))
    })?;
    if i == 0 {
        return Err(Error::InvalidInput(
            "x_eval needs a grid node to its left for the consistency check".into(),
        ));
    }
    let k = f.k();
    let two_ik = c(0.0, 2.0) * k;
    let t = &f.gauge_values()[i];
    let tp = &f.gauge_derivatives()[i];
    // in the gauge T = e^{-ikx} F: A = T + T'/(2ik), B = -e^{2ikx} T'/(2ik)
    let a = t + tp / two_ik;
    let b = tp * (-(two_ik * x_eval).exp() / two_ik);
    // T(x) = A + e^{-2ikx} B must also hold one node further left
    let x2 = f.nodes()[i - 1];
    let rebuilt = &a + &b * (-two_ik * x2).exp();
    let stored = &f.gauge_values()[i - 1];
    let mismatch = (&rebuilt - stored).norm() / stored.norm().max(1.0);
    if mismatch > CONSISTENCY_TOL {
        return Err(Error::ToleranceNotMet {
            residual: mismatch,
            limit: CONSISTENCY_TOL,
        });
    }
    Ok((a, b))
}

/// Default extraction point: one node left of `x_min`.
pub fn default_x_eval(v: &MatrixPotential) -> f64 {
    v.x(v.support_start_index() - 1)
}

/// `(A(k), B(k))` for one spectral parameter.
pub fn scattering_matrices(v: &MatrixPotential, k: Complex64) -> Result<(CMat, CMat)> {
    let f = jost_solve(v, k, Direction::FromPlusInfinity, JOST_TOL)?;
    extract_ab(&f, default_x_eval(v))
}

pub fn det_a(v: &MatrixPotential, k: Complex64) -> Result<Complex64> {
    Ok(scattering_matrices(v, k)?.0.determinant())
}

/// Residuals of the unitarity relations at a real `k`, each normalized by
/// `max(1, ||A||^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationResiduals {
    /// `A(-k)A*(-k) - B(k)B*(k) - I`
    pub d: f64,
    /// `B(-k)A*(-k) - A(k)B*(k)`
    pub d1: f64,
    /// `|det A(k)|^2 - det(I + B(-k)B*(-k))`
    pub e: f64,
}

pub fn relation_residuals(a: &CMat, b: &CMat, a_neg: &CMat, b_neg: &CMat) -> RelationResiduals {
    let n = a.nrows();
    let id = linalg::identity(n);
    let scale = a.norm().max(a_neg.norm()).powi(2).max(1.0);
    let d = (a_neg * a_neg.adjoint() - b * b.adjoint() - &id).norm() / scale;
    let d1 = (b_neg * a_neg.adjoint() - a * b.adjoint()).norm() / scale;
    let lhs = a.determinant().norm_sqr();
    let rhs = (&id + b_neg * b_neg.adjoint()).determinant().re;
    let e = (lhs - rhs).abs() / lhs.max(1.0);
    RelationResiduals { d, d1, e }
}

#[derive(Debug, Clone)]
pub struct ScatteringPoint {
    pub k: Complex64,
    pub a: CMat,
    pub b: CMat,
    pub det_a: Complex64,
    /// Present for real `k` only.
    pub residuals: Option<RelationResiduals>,
}

/// Scattering data on a k-grid; a failed solve is kept as an error for its `k`.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub k_grid: Vec<Complex64>,
    pub points: Vec<Result<ScatteringPoint>>,
}

impl ScatteringData {
    pub fn successes(&self) -> impl Iterator<Item = &ScatteringPoint> {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (Complex64, &Error)> {
        self.k_grid
            .iter()
            .zip(&self.points)
            .filter_map(|(k, p)| p.as_ref().err().map(|e| (*k, e)))
    }

    /// Largest residual of each relation over the real points.
    pub fn max_residuals(&self) -> RelationResiduals {
        self.successes().filter_map(|p| p.residuals).fold(
            RelationResiduals {
                d: 0.0,
                d1: 0.0,
                e: 0.0,
            },
            |acc, r| RelationResiduals {
                d: acc.d.max(r.d),
                d1: acc.d1.max(r.d1),
                e: acc.e.max(r.e),
            },
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_re,k_im,detA_re,detA_im,res_D,res_D1,res_E\n");
        for (k, p) in self.k_grid.iter().zip(&self.points) {
            let (det, res) = match p {
                Ok(p) => (p.det_a, p.residuals),
                Err(_) => (c(f64::NAN, f64::NAN), None),
            };
            let (rd, rd1, re) = res.map_or((f64::NAN, f64::NAN, f64::NAN), |r| (r.d, r.d1, r.e));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                k.re, k.im, det.re, det.im, rd, rd1, re
            );
        }
        out
    }
}

fn is_real(k: Complex64) -> bool {
    k.im == 0.0
}

fn scan_point(v: &MatrixPotential, k: Complex64) -> Result<ScatteringPoint> {
    let (a, b) = scattering_matrices(v, k)?;
    let residuals = if is_real(k) {
        let (a_neg, b_neg) = scattering_matrices(v, -k)?;
        Some(relation_residuals(&a, &b, &a_neg, &b_neg))
    } else {
        None
    };
    Ok(ScatteringPoint {
        k,
        det_a: a.determinant(),
        a,
        b,
        residuals,
    })
}

/// Evaluates `A`, `B`, `det A` and, at real `k`, the relation residuals.
pub fn scattering_scan(v: &MatrixPotential, k_grid: &[Complex64]) -> Result<ScatteringData> {
    for &k in k_grid {
        check_k(k)?;
    }
    let points = k_grid.par_iter().map(|&k| scan_point(v, k)).collect();
    Ok(ScatteringData {
        k_grid: k_grid.to_vec(),
        points,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Log-log slope of `||B(k)||` over `k_list`; `-inf` when `B` vanishes.
pub fn b_decay_check(v: &MatrixPotential, k_list: &[f64]) -> Result<f64> {
    if v.smoothness() != Smoothness::Smooth {
        return Err(Error::Precondition(
            "B(k) decays only like k^-2 for piecewise-constant potentials; \
             the decay-order check needs a smooth potential"
                .into(),
        ));
    }
    if k_list.len() < 2 || k_list.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "k_list must hold at least two increasing positive values".into(),
        ));
    }
    if k_list[k_list.len() - 1] < 10.0 * k_list[0] {
        return Err(Error::InvalidInput("k_list must span at least one decade".into()));
    }
    let norms: Vec<f64> = k_list
        .par_iter()
        .map(|&k| scattering_matrices(v, c(k, 0.0)).map(|(_, b)| b.norm()))
        .collect::<Result<_>>()?;
    if norms.contains(&0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_log_slope(k_list, &norms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStateSource {
    DetAZeros,
    FdEigensolver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateSet {
    /// Strictly decreasing; eigenvalues are `-κ²`.
    pub kappas: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub source: BoundStateSource,
    /// Roots closer than `10 tol` to a neighbour.
    #[serde(default)]
    pub unresolved: Vec<f64>,
    /// Per-root failures of the root finder.
    #[serde(default)]
    pub failures: Vec<String>,
}

impl BoundStateSet {
    pub fn empty(source: BoundStateSource) -> Self {
        Self {
            kappas: Vec::new(),
            multiplicities: Vec::new(),
            source,
            unresolved: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `Σ m_l κ_l^p`.
    pub fn moment(&self, p: i32) -> f64 {
        self.kappas
            .iter()
            .zip(&self.multiplicities)
            .map(|(k, &m)| m as f64 * k.powi(p))
            .sum()
    }
}

/// Number of scan points on the imaginary axis.
pub const KAPPA_SCAN_POINTS: usize = 400;
/// Lower end of the κ scan.
pub const KAPPA_MIN: f64 = 1e-3;
/// Singular values below this fraction of `||A||` count towards multiplicity.
pub const KERNEL_RTOL: f64 = 1e-6;

/// A priori bracket `1 + sup ||V||^{1/2}` for the bound-state κ.
pub fn default_kappa_max(v: &MatrixPotential) -> f64 {
    1.0 + v.sup_norm().sqrt()
}

fn a_imag(v: &MatrixPotential, kappa: f64) -> Result<CMat> {
    Ok(scattering_matrices(v, c(0.0, kappa))?.0)
}

/// Singular values below `KERNEL_RTOL * scale`. The scale comes from
/// neighbouring scan points: when all of `A` vanishes at the root its own
/// norm is no reference.
fn kernel_dim(a: &CMat, scale: f64) -> usize {
    let cut = KERNEL_RTOL * scale;
    linalg::singular_values(a).iter().filter(|&&x| x <= cut).count()
}

fn sigma_min(a: &CMat) -> f64 {
    linalg::singular_values(a).last().copied().unwrap_or(0.0)
}

/// Bisection on the sign of `det A(iκ)` until the bracket is below `tol`.
fn bisect(v: &MatrixPotential, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = a_imag(v, mid)?.determinant().re;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "bisection on [{lo}, {hi}] did not reach {tol}"
    )))
}

/// Golden-section minimization of `σ_min(A(iκ))` on `[lo, hi]`.
fn golden_min(v: &MatrixPotential, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = sigma_min(&a_imag(v, x1)?);
    let mut f2 = sigma_min(&a_imag(v, x2)?);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = sigma_min(&a_imag(v, x1)?);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = sigma_min(&a_imag(v, x2)?);
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Zeros of `det A(iκ)` on `(KAPPA_MIN, kappa_max]`.
///
/// Sign changes of the real determinant are bisected to `tol`. Interior
/// minima of the smallest singular value are refined as well, which finds
/// zeros of even order that leave the sign unchanged.
pub fn bound_states_from_det_a(
    v: &MatrixPotential,
    kappa_max: f64,
    tol: f64,
) -> Result<BoundStateSet> {
    if !(kappa_max.is_finite() && kappa_max > KAPPA_MIN) {
        return Err(Error::InvalidInput(format!(
            "kappa_max must exceed {KAPPA_MIN} (got {kappa_max})"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive (got {tol})")));
    }
    let mut set = BoundStateSet::empty(BoundStateSource::DetAZeros);
    if v.is_zero() {
        return Ok(set);
    }
    let step = (kappa_max - KAPPA_MIN) / KAPPA_SCAN_POINTS as f64;
    let kappas: Vec<f64> = (0..=KAPPA_SCAN_POINTS)
        .map(|j| {
            if j == KAPPA_SCAN_POINTS {
                kappa_max
            } else {
                KAPPA_MIN + j as f64 * step
            }
        })
        .collect();
    // (det A, σ_min, ||A||) at each scan point
    let scan: Vec<(f64, f64, f64)> = kappas
        .par_iter()
        .map(|&kappa| {
            let a = a_imag(v, kappa)?;
            let sv = linalg::singular_values(&a);
            Ok((a.determinant().re, sv[sv.len() - 1], sv[0]))
        })
        .collect::<Result<_>>()?;
    let scale_near = |r: f64| -> f64 {
        let j = (((r - KAPPA_MIN) / step).floor().max(0.0) as usize).min(KAPPA_SCAN_POINTS - 1);
        scan[j].2.max(scan[j + 1].2)
    };

    let mut roots: Vec<f64> = Vec::new();
    for j in 0..KAPPA_SCAN_POINTS {
        let (d0, d1) = (scan[j].0, scan[j + 1].0);
        if d0 == 0.0 {
            roots.push(kappas[j]);
        } else if (d0 > 0.0) != (d1 > 0.0) && d1 != 0.0 {
            match bisect(v, kappas[j], kappas[j + 1], d0, tol) {
                Ok(r) => roots.push(r),
                Err(e) => set.failures.push(e.to_string()),
            }
        }
    }
    if scan[KAPPA_SCAN_POINTS].0 == 0.0 {
        roots.push(kappa_max);
    }
    for j in 1..KAPPA_SCAN_POINTS {
        let s = scan[j].1;
        if !(s < scan[j - 1].1 && s <= scan[j + 1].1) {
            continue;
        }
        if roots.iter().any(|r| (r - kappas[j]).abs() <= 2.0 * step) {
            continue;
        }
        match golden_min(v, kappas[j - 1], kappas[j + 1], tol) {
            Ok((r, _)) => {
                let a = a_imag(v, r)?;
                if sigma_min(&a) <= KERNEL_RTOL * scale_near(r) {
                    roots.push(r);
                }
            }
            Err(e) => set.failures.push(e.to_string()),
        }
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol);
    for w in roots.windows(2) {
        if w[0] - w[1] < 10.0 * tol {
            set.unresolved.push(w[0]);
            set.unresolved.push(w[1]);
        }
    }
    set.unresolved.dedup();
    for r in roots {
        let m = kernel_dim(&a_imag(v, r)?, scale_near(r)).max(1);
        set.kappas.push(r);
        set.multiplicities.push(m);
    }
    log::debug!("det A zeros: {:?}", set.kappas);
    Ok(set)
}

/// Rejects potentials with a zero-energy resonance, where `det A(k)` stays
/// bounded as `k -> 0` and the small-k treatment of the trace integrals breaks.
pub fn resonance_screen(v: &MatrixPotential) -> Result<()> {
    if v.is_zero() {
        return Ok(());
    }
    let det = det_a(v, c(0.0, KAPPA_MIN))?.norm();
    if det < RESONANCE_THRESHOLD {
        return Err(Error::Resonant { det_abs: det });
    }
    Ok(())
}

/// Lower bound on `|det A(i 1e-3)|` accepted by [`resonance_screen`].
pub const RESONANCE_THRESHOLD: f64 = 0.1;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::panel_exponential_ab;
    use crate::potential::{build_potential, Envelope, PotentialSpec};
    use std::f64::consts::PI;

    #[test]
    fn free_scattering_is_trivial() {
        let v = build_potential(&PotentialSpec::zero(2)).unwrap();
        let data = scattering_scan(&v, &[c(0.5, 0.0), c(3.0, 0.0), c(0.0, 2.0)]).unwrap();
        for p in data.successes() {
            assert!((&p.a - linalg::identity(2)).norm() < 1e-14);
            assert!(p.b.norm() < 1e-14);
        }
        let r = data.max_residuals();
        assert!(r.d < 1e-14 && r.d1 < 1e-14 && r.e < 1e-14);
        assert!(bound_states_from_det_a(&v, 2.0, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn transparent_square_well() {
        let v = build_potential(&PotentialSpec::square_well(3.0 * PI * PI, 1.0)).unwrap();
        let (a, b) = scattering_matrices(&v, c(PI, 0.0)).unwrap();
        assert!(b.norm() <= 1e-8, "{}", b.norm());
        assert!((a.determinant().norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn square_well_matches_panel_oracle() {
        let v = build_potential(&PotentialSpec::square_well(4.0, 1.0)).unwrap();
        for k in [0.3, 1.0, 4.0] {
            let (a, b) = scattering_matrices(&v, c(k, 0.0)).unwrap();
            let (ea, eb) = panel_exponential_ab(&v, c(k, 0.0)).unwrap();
            assert!((a - ea).norm() < 1e-9, "k = {k}");
            assert!((b - eb).norm() < 1e-9, "k = {k}");
        }
    }

    #[test]
    fn extraction_rejects_points_inside_support() {
        let v = build_potential(&PotentialSpec::bump(1.0, 1.0)).unwrap();
        let f = jost_solve(&v, c(1.0, 0.0), Direction::FromPlusInfinity, JOST_TOL).unwrap();
        assert!(extract_ab(&f, 0.0).is_err());
        assert!(extract_ab(&f, default_x_eval(&v)).is_ok());
    }

    #[test]
    fn random_potential_unitarity() {
        let spec = PotentialSpec::random_hermitian(2, 7, 1.0, Envelope::default());
        let v = build_potential(&spec).unwrap();
        let ks: Vec<Complex64> = [0.25, 1.0, 4.0, 16.0, 32.0].iter().map(|&k| c(k, 0.0)).collect();
        let data = scattering_scan(&v, &ks).unwrap();
        assert_eq!(data.failures().count(), 0);
        let r = data.max_residuals();
        assert!(r.d < 1e-7 && r.d1 < 1e-7 && r.e < 1e-7, "{r:?}");
        for p in data.successes() {
            assert!(p.det_a.norm() >= 1.0 - r.e);
        }
    }

    #[test]
    fn shallow_well_binds_once() {
        let v = build_potential(&PotentialSpec::square_well(0.5, 1.0)).unwrap();
        let set = bound_states_from_det_a(&v, default_kappa_max(&v), 1e-12).unwrap();
        assert_eq!(set.multiplicities, vec![1]);
        // even-parity state of the well centred at 1/2: q tan(q/2) = κ, q² = V0 - κ²
        let kappa = set.kappas[0];
        let q = (0.5 - kappa * kappa).sqrt();
        assert!((q * (q / 2.0).tan() - kappa).abs() < 1e-6);
    }

    #[test]
    fn even_multiplicity_found_without_sign_change() {
        let spec = PotentialSpec::bump(4.0, 1.0).times_identity(2);
        let v = build_potential(&spec).unwrap();
        let scalar = build_potential(&PotentialSpec::bump(4.0, 1.0)).unwrap();
        let s = bound_states_from_det_a(&scalar, default_kappa_max(&scalar), 1e-12).unwrap();
        let m = bound_states_from_det_a(&v, default_kappa_max(&v), 1e-12).unwrap();
        assert_eq!(m.kappas.len(), s.kappas.len());
        for (a, b) in m.kappas.iter().zip(&s.kappas) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(m.multiplicities.iter().all(|&x| x == 2));
    }

    #[test]
    fn b_decay_preconditions() {
        let well = build_potential(&PotentialSpec::square_well(1.0, 1.0)).unwrap();
        assert!(matches!(
            b_decay_check(&well, &[4.0, 40.0]),
            Err(Error::Precondition(_))
        ));
        let zero = build_potential(&PotentialSpec::zero(1)).unwrap();
        assert_eq!(b_decay_check(&zero, &[4.0, 40.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn csv_has_expected_header() {
        let v = build_potential(&PotentialSpec::bump(1.0, 1.0)).unwrap();
        let data = scattering_scan(&v, &[c(1.0, 0.0)]).unwrap();
        let csv = data.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k_re,k_im,detA_re,detA_im,res_D,res_D1,res_E"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 7);
    }
}
