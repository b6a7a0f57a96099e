//! Classical phase-space constants and checks of the sharp Lieb–Thirring
//! inequality `Σ|λ|^γ <= L^cl_{γ,d} ∫ tr V_-^{γ+d/2}`.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Box2d, Field3d, Potential2dSpec};
use crate::gamma::{beta, gamma as gamma_fn};
use crate::linalg::{c, CMat};
use crate::potential::{build_potential_with_spacing, MatrixPotential, PotentialSpec};
use crate::quadrature::{tanh_sinh, GaussLegendre};
use crate::spectrum::{
    self, fd_eigensolve_1d_resolved, fd_eigensolve_2d, interior_nodes, power_sum, refined_points, riesz_mean,
    SpectrumResult, DEFAULT_SPACING_1D,
};

/// Absolute tolerance added to every inequality check.
pub const BOUND_TOL: f64 = 1e-6;
/// Smallest exponent for which the classical constant is the sharp one.
pub const SHARP_GAMMA: f64 = 1.5;
/// Minimal number of grid points per shortest wavelength in a Weyl scan.
pub const POINTS_PER_WAVELENGTH: f64 = 10.0;

fn check_gamma_d(gamma: f64, d: u32) -> Result<()> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidInput(format!("gamma must be >= 0 (got {gamma})")));
    }
    if d == 0 {
        return Err(Error::InvalidInput("d must be a positive integer".into()));
    }
    Ok(())
}

/// `L^cl_{γ,d} = Γ(γ+1) / (2^d π^{d/2} Γ(γ + d/2 + 1))`.
pub fn classical_constant(gamma: f64, d: u32) -> Result<f64> {
    check_gamma_d(gamma, d)?;
    let df = d as f64;
    if let (Some(a), Some(b)) = (sqrt_pi_split(gamma + 1.0), sqrt_pi_split(gamma + 0.5 * df + 1.0)) {
        // the √π factors cancel exactly against π^{d/2}
        let pi_power = 0.5 * f64::from(a.1 - b.1 - d as i32);
        return Ok(a.0 / (b.0 * 2f64.powi(d as i32)) * PI.powf(pi_power));
    }
    Ok(gamma_fn(gamma + 1.0) / (2f64.powf(df) * PI.powf(0.5 * df) * gamma_fn(gamma + 0.5 * df + 1.0)))
}

/// `Γ(x) = r · √π^s` for small positive integers and half-integers `x`.
fn sqrt_pi_split(x: f64) -> Option<(f64, i32)> {
    let twice = 2.0 * x;
    if twice.fract() != 0.0 || !(1.0..=60.0).contains(&twice) {
        return None;
    }
    let (mut y, mut r) = (x, 1.0);
    while y > 1.0 {
        y -= 1.0;
        r *= y;
    }
    // y is now 1 or 1/2, and Γ(1/2) = √π
    Some(if y == 1.0 { (r, 0) } else { (r, 1) })
}

/// `(2π)^{-d} ∫ (|ξ|² - 1)_-^γ dξ` by radial quadrature.
pub fn phase_space_constant(gamma: f64, d: u32) -> Result<f64> {
    check_gamma_d(gamma, d)?;
    let df = d as f64;
    let sphere = 2.0 * PI.powf(0.5 * df) / gamma_fn(0.5 * df);
    let radial = tanh_sinh(0.0, 1.0, 1e-14, |r| (1.0 - r * r).powf(gamma) * r.powi(d as i32 - 1));
    Ok(sphere * radial / (2.0 * PI).powf(df))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtReport {
    pub gamma: f64,
    pub dimension: u32,
    /// Riesz mean of the Richardson-extrapolated levels.
    pub riesz_mean: f64,
    /// `∫ tr V_-^{γ+d/2}`.
    pub potential_integral: f64,
    pub classical_constant: f64,
    pub classical_bound: f64,
    pub ratio: f64,
    /// Coarse/fine gap of the Riesz mean in units of the bound.
    pub slack: f64,
    /// False for `γ < 3/2`, where the classical constant is not the sharp one.
    pub sharp_claim: bool,
    pub replaced_positive_part: bool,
}

impl LtReport {
    fn new(gamma: f64, d: u32, spectrum: &SpectrumResult, potential_integral: f64, replaced: bool) -> Result<Self> {
        let lcl = classical_constant(gamma, d)?;
        let bound = lcl * potential_integral;
        let rm = riesz_mean(spectrum, gamma);
        let gap = (spectrum.riesz_mean_fine(gamma) - spectrum.riesz_mean_coarse(gamma)).abs();
        let (ratio, slack) = if bound > 0.0 { (rm / bound, gap / bound) } else { (0.0, 0.0) };
        Ok(Self {
            gamma,
            dimension: d,
            riesz_mean: rm,
            potential_integral,
            classical_constant: lcl,
            classical_bound: bound,
            ratio,
            slack,
            sharp_claim: gamma >= SHARP_GAMMA,
            replaced_positive_part: replaced,
        })
    }

    /// `ratio <= 1 + BOUND_TOL + slack`.
    pub fn within_bound(&self) -> bool {
        self.ratio <= 1.0 + BOUND_TOL + self.slack
    }

    pub const CSV_HEADER: &'static str = "gamma,d,riesz_mean,potential_integral,Lcl,ratio,slack";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.gamma,
            self.dimension,
            self.riesz_mean,
            self.potential_integral,
            self.classical_constant,
            self.ratio,
            self.slack
        )
    }
}

/// Replaces `V` by `-V_-` when it has a positive part; that only lowers the
/// operator and leaves `∫ tr V_-^p` unchanged.
fn nonpositive_version(v: &MatrixPotential) -> Result<(Option<MatrixPotential>, bool)> {
    if v.is_nonpositive() {
        return Ok((None, false));
    }
    log::warn!("potential has a positive part; checking the bound for -V_- instead");
    let spec = PotentialSpec::NegativePart {
        inner: Box::new(v.spec().clone()),
    };
    Ok((Some(build_potential_with_spacing(&spec, v.spacing())?), true))
}

fn check_lt_gamma(gamma: f64) -> Result<()> {
    check_gamma_d(gamma, 1)?;
    if gamma < SHARP_GAMMA {
        log::warn!("gamma = {gamma} < 3/2: no sharp-constant claim");
    }
    Ok(())
}

/// Lieb–Thirring ratio for a matrix potential on the line.
pub fn lt_ratio(v: &MatrixPotential, gamma: f64) -> Result<LtReport> {
    lt_ratio_with_spacing(v, gamma, DEFAULT_SPACING_1D)
}

pub fn lt_ratio_with_spacing(v: &MatrixPotential, gamma: f64, spacing: f64) -> Result<LtReport> {
    lt_ratio_and_spectrum(v, gamma, spacing).map(|r| r.0)
}

fn lt_ratio_and_spectrum(v: &MatrixPotential, gamma: f64, spacing: f64) -> Result<(LtReport, SpectrumResult)> {
    check_lt_gamma(gamma)?;
    let (replacement, replaced) = nonpositive_version(v)?;
    let v = replacement.as_ref().unwrap_or(v);
    let integral = v.integral_negative_part_pow(gamma + 0.5);
    let spectrum = if v.is_zero() || integral == 0.0 {
        SpectrumResult::empty(0.0, spacing)
    } else {
        fd_eigensolve_1d_resolved(v, spacing)?
    };
    Ok((LtReport::new(gamma, 1, &spectrum, integral, replaced)?, spectrum))
}

/// Lieb–Thirring ratio for a scalar potential on a Dirichlet box in the plane.
pub fn lt_ratio_2d(v: &Potential2dSpec, bx: &Box2d, n_points: usize, gamma: f64) -> Result<LtReport> {
    check_lt_gamma(gamma)?;
    let spectrum = fd_eigensolve_2d(v, bx, n_points)?;
    let integral = integral_negative_part_2d(v, bx, gamma + 1.0)?;
    LtReport::new(gamma, 2, &spectrum, integral, false)
}

/// Breakpoints of `v` along each axis inside `bx`: box edges and well edges.
fn axis_breaks(v: &Potential2dSpec, bx: &Box2d) -> [Vec<f64>; 2] {
    let mut out = [vec![bx.x1.0, bx.x1.1], vec![bx.x2.0, bx.x2.1]];
    if let Potential2dSpec::Separable { first, second } = v {
        for (axis, w) in [first, second].into_iter().enumerate() {
            let (a, b) = w.support();
            out[axis].extend([a, b]);
            if let PotentialSpec::SquareWell { left, width, .. } = w {
                out[axis].extend([*left, left + width]);
            }
        }
    }
    let lims = [bx.x1, bx.x2];
    for (axis, pts) in out.iter_mut().enumerate() {
        let (lo, hi) = lims[axis];
        pts.retain(|&x| x >= lo && x <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }
    out
}

fn panel_nodes(breaks: &[f64], gl: &GaussLegendre) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let panels = ((w[1] - w[0]) / 0.1).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let a = w[0] + p as f64 * step;
            out.extend(gl.mapped(a, a + step));
        }
    }
    out
}

/// `∫∫_box v_-^p` by composite Gauss–Legendre with panels split at the jumps.
pub fn integral_negative_part_2d(v: &Potential2dSpec, bx: &Box2d, p: f64) -> Result<f64> {
    v.validate()?;
    bx.validate()?;
    let gl = GaussLegendre::new(8);
    let [b1, b2] = axis_breaks(v, bx);
    let (n1, n2) = (panel_nodes(&b1, &gl), panel_nodes(&b2, &gl));
    // collected before summing so the result does not depend on thread scheduling
    let rows: Vec<f64> = n2
        .par_iter()
        .map(|&(y, wy)| {
            n1.iter()
                .map(|&(x, wx)| wx * (-v.eval(x, y)).max(0.0).powf(p))
                .sum::<f64>()
                * wy
        })
        .collect();
    Ok(rows.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylScan {
    pub alphas: Vec<f64>,
    pub reports: Vec<LtReport>,
}

impl WeylScan {
    pub fn ratios(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.ratio).collect()
    }

    pub fn is_nondecreasing(&self, slack: f64) -> bool {
        self.ratios().windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

/// The scalar well `-1` on `[0, 1]` used for Weyl scans.
pub fn weyl_well() -> PotentialSpec {
    PotentialSpec::square_well(1.0, 1.0)
}

/// Lieb–Thirring ratios of `α V` for increasing couplings. Refuses when the
/// grid would put fewer than ten points on the wavelength `1/sqrt(α sup|V|)`.
pub fn weyl_scan(spec: &PotentialSpec, gamma: f64, alphas: &[f64]) -> Result<WeylScan> {
    if alphas.is_empty() || alphas.iter().any(|&a| !(a >= 1.0)) || alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("alphas must be increasing and >= 1".into()));
    }
    let base = build_potential_with_spacing(spec, crate::potential::DEFAULT_SPACING)?;
    let sup = base.sup_norm();
    let reports = alphas
        .iter()
        .map(|&alpha| {
            let v = build_potential_with_spacing(&spec.clone().scaled(alpha), base.spacing())?;
            let wavelength = if sup > 0.0 { 1.0 / (alpha * sup).sqrt() } else { f64::INFINITY };
            let spacing = DEFAULT_SPACING_1D.min(wavelength / POINTS_PER_WAVELENGTH);
            let (a, b) = v.support();
            if v.dim() as f64 * (b - a) / spacing >= spectrum::SIZE_LIMIT as f64 {
                return Err(Error::Precondition(format!(
                    "resolving wavelength {wavelength:.3e} at alpha = {alpha} needs more than {} nodes",
                    spectrum::SIZE_LIMIT
                )));
            }
            let (report, s) = lt_ratio_and_spectrum(&v, gamma, spacing)?;
            if sup > 0.0 && report.classical_bound > 0.0 {
                let coarse = 2.0 * s.grid_spacing;
                if coarse > wavelength / POINTS_PER_WAVELENGTH * (1.0 + 1e-9) {
                    return Err(Error::Precondition(format!(
                        "grid spacing {coarse:.3e} does not resolve wavelength {wavelength:.3e} at alpha = {alpha}"
                    )));
                }
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeylScan {
        alphas: alphas.to_vec(),
        reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AizenmanLieb {
    pub gamma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `L^cl_{γ,1} = (3/16) B(γ-3/2, 3) / B(γ-3/2, 5/2)` with the standard Beta function.
pub fn aizenman_lieb_identity(gamma: f64) -> Result<AizenmanLieb> {
    if !(gamma.is_finite() && gamma > SHARP_GAMMA) {
        return Err(Error::InvalidInput(format!(
            "gamma must exceed 3/2, where Γ(γ - 3/2) has its pole (got {gamma})"
        )));
    }
    let lhs = classical_constant(gamma, 1)?;
    let x = gamma - SHARP_GAMMA;
    let rhs = 3.0 / 16.0 * beta(x, 3.0) / beta(x, 2.5);
    Ok(AizenmanLieb {
        gamma,
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaLift {
    pub gamma0: f64,
    pub gamma: f64,
    /// `Σ |λ|^γ`.
    pub riesz: f64,
    /// `B(γ-γ0, γ0+1)^{-1} ∫ t^{γ-γ0-1} Σ (λ+t)_-^{γ0} dt`.
    pub riesz_lifted: f64,
    /// `L^cl_{γ,1} ∫ tr V_-^{γ+1/2}`.
    pub bound: f64,
    /// `B(γ-γ0, γ0+1)^{-1} ∫ t^{γ-γ0-1} L^cl_{γ0,1} ∫ tr (V+t)_-^{γ0+1/2} dt`.
    pub bound_lifted: f64,
}

impl GammaLift {
    pub fn identity_residual(&self) -> f64 {
        let r = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
        r(self.riesz, self.riesz_lifted).max(r(self.bound, self.bound_lifted))
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.riesz_lifted <= self.bound_lifted * (1.0 + BOUND_TOL) + slack
    }
}

/// Integral of `t^{a} g(t)` over `(0, top)` split at `kinks`.
fn lift_integral(a: f64, kinks: &[f64], top: f64, g: impl Fn(f64) -> f64) -> f64 {
    let mut pts: Vec<f64> = kinks.iter().copied().filter(|&k| k > 0.0 && k < top).collect();
    pts.push(0.0);
    pts.push(top);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| tanh_sinh(w[0], w[1], 1e-12, |t| t.powf(a) * g(t)))
        .sum()
}

/// Raising the exponent from `γ0` to `γ` by integrating over spectral shifts:
/// both sides of the Lieb–Thirring inequality are lifted, so the inequality
/// at `γ0` for every shifted potential implies it at `γ`.
pub fn gamma_lift_check(v: &MatrixPotential, spectrum: &SpectrumResult, gamma0: f64, gamma: f64) -> Result<GammaLift> {
    check_gamma_d(gamma0, 1)?;
    if !(gamma > gamma0) {
        return Err(Error::InvalidInput(format!("gamma = {gamma} must exceed gamma0 = {gamma0}")));
    }
    let levels: Vec<f64> = spectrum
        .richardson_estimate
        .iter()
        .zip(&spectrum.multiplicities)
        .flat_map(|(&l, &m)| std::iter::repeat_n(l, m))
        .collect();
    let norm = 1.0 / beta(gamma - gamma0, gamma0 + 1.0);
    let a = gamma - gamma0 - 1.0;
    let kinks: Vec<f64> = levels.iter().map(|l| -l).collect();
    let top = kinks.iter().copied().fold(0.0, f64::max);
    let riesz_lifted = if top > 0.0 {
        norm * lift_integral(a, &kinks, top, |t| {
            levels.iter().map(|l| (-(l + t)).max(0.0).powf(gamma0)).sum()
        })
    } else {
        0.0
    };
    let spectra = v.pointwise_eigenvalues();
    let sup = spectra.sup();
    let l0 = classical_constant(gamma0, 1)?;
    let p0 = gamma0 + 0.5;
    let bound_lifted = if sup > 0.0 {
        let shifted = |t: f64| spectra.integrate(|mu| mu.iter().map(|m| (-(m + t)).max(0.0).powf(p0)).sum());
        norm * l0 * lift_integral(a, &[], sup, shifted)
    } else {
        0.0
    };
    Ok(GammaLift {
        gamma0,
        gamma,
        riesz: power_sum(&levels, gamma),
        riesz_lifted,
        bound: classical_constant(gamma, 1)? * v.integral_negative_part_pow(gamma + 0.5),
        bound_lifted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainValue {
    pub coarse: f64,
    pub fine: f64,
}

impl ChainValue {
    fn gap(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftingChain {
    pub gamma: f64,
    /// `tr(-Δ + v)_-^γ`.
    pub full: ChainValue,
    /// `tr(-d²/dx2² - W_-(x2))_-^γ`.
    pub operator_valued: ChainValue,
    /// `L^cl_{γ,1} ∫ tr W_-^{γ+1/2}(x2) dx2`.
    pub slice_bound: ChainValue,
    /// `L^cl_{γ,2} ∫∫ v_-^{γ+1}`, computed once by quadrature.
    pub classical: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainLink {
    FullToOperatorValued,
    OperatorValuedToSliceBound,
    SliceBoundToClassical,
}

impl LiftingChain {
    /// Quantities on the finer grid, in chain order.
    pub fn values(&self) -> [f64; 4] {
        [self.full.fine, self.operator_valued.fine, self.slice_bound.fine, self.classical]
    }

    /// Allowed excess on each link: tolerance plus the coarse/fine gaps of both ends.
    pub fn slacks(&self) -> [f64; 3] {
        let tol = |x: f64| BOUND_TOL * x.abs().max(1.0);
        [
            tol(self.operator_valued.fine) + self.full.gap() + self.operator_valued.gap(),
            tol(self.slice_bound.fine) + self.operator_valued.gap() + self.slice_bound.gap(),
            tol(self.classical) + self.slice_bound.gap(),
        ]
    }

    /// Links whose ordering is violated beyond their slack.
    pub fn failing_links(&self) -> Vec<ChainLink> {
        let v = self.values();
        let s = self.slacks();
        [
            ChainLink::FullToOperatorValued,
            ChainLink::OperatorValuedToSliceBound,
            ChainLink::SliceBoundToClassical,
        ]
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| v[i] > v[i + 1] + s[i])
        .map(|(_, l)| l)
        .collect()
    }

    pub fn ordered(&self) -> bool {
        self.failing_links().is_empty()
    }
}

struct ChainGrid {
    full: f64,
    operator_valued: f64,
    slice_bound: f64,
}

fn chain_on_grid(v: &Potential2dSpec, bx: &Box2d, n_points: usize, gamma: f64, l1: f64) -> Result<ChainGrid> {
    let full = power_sum(&spectrum::solve_box_2d(v, bx, n_points)?, gamma);
    let (x2, h2) = interior_nodes(bx.x2.0, bx.x2.1, n_points);
    // W_- at every x2 node, boundary included for the trapezoid rule
    let all_x2: Vec<f64> = std::iter::once(bx.x2.0).chain(x2.iter().copied()).chain(std::iter::once(bx.x2.1)).collect();
    let parts: Vec<(CMat, f64)> = all_x2
        .par_iter()
        .map(|&y| {
            let w = spectrum::slice_operator(v, bx, n_points, y);
            let eig = SymmetricEigen::new(w);
            let n = eig.eigenvalues.len();
            let neg = eig.eigenvalues.map(|l| (-l).max(0.0));
            let m = &eig.eigenvectors * nalgebra::DMatrix::from_diagonal(&neg) * eig.eigenvectors.transpose();
            let tr: f64 = neg.iter().map(|&l| l.powf(gamma + 0.5)).sum();
            (CMat::from_fn(n, n, |i, j| c(-m[(i, j)], 0.0)), tr)
        })
        .collect();
    let trapezoid: Vec<f64> = parts.iter().map(|p| p.1).collect();
    let slice_bound = l1 * crate::quadrature::trapezoid(&trapezoid, h2);
    let blocks: Vec<CMat> = parts[1..parts.len() - 1].iter().map(|p| p.0.clone()).collect();
    let operator_valued = power_sum(&spectrum::block_operator_eigenvalues(&blocks, h2)?, gamma);
    Ok(ChainGrid {
        full,
        operator_valued,
        slice_bound,
    })
}

/// The dimension-lifting chain for a non-positive scalar potential in the
/// plane, on `n_points` and `2 n_points - 1` nodes per axis.
pub fn lifting_chain_check(v: &Potential2dSpec, bx: &Box2d, n_points: usize, gamma: f64) -> Result<LiftingChain> {
    v.validate()?;
    bx.validate()?;
    if !(gamma.is_finite() && gamma >= SHARP_GAMMA) {
        return Err(Error::InvalidInput(format!("gamma must be >= 3/2 (got {gamma})")));
    }
    if n_points < 5 {
        return Err(Error::InvalidInput("need at least 5 nodes per axis".into()));
    }
    let nf = refined_points(n_points);
    let interior = nf - 2;
    if interior * interior > spectrum::SIZE_LIMIT {
        return Err(Error::SizeGuard {
            size: interior * interior,
            limit: spectrum::SIZE_LIMIT,
        });
    }
    let l1 = classical_constant(gamma, 1)?;
    let coarse = chain_on_grid(v, bx, n_points, gamma, l1)?;
    let fine = chain_on_grid(v, bx, nf, gamma, l1)?;
    let classical = classical_constant(gamma, 2)? * integral_negative_part_2d(v, bx, gamma + 1.0)?;
    let pair = |c: f64, f: f64| ChainValue { coarse: c, fine: f };
    Ok(LiftingChain {
        gamma,
        full: pair(coarse.full, fine.full),
        operator_valued: pair(coarse.operator_valued, fine.operator_valued),
        slice_bound: pair(coarse.slice_bound, fine.slice_bound),
        classical,
    })
}

/// `L^cl_{γ,3} ∫ [(V+B)_-^{γ+3/2} + (V-B)_-^{γ+3/2}] dx` on a common 3D grid.
pub fn pauli_rhs(v: &Field3d, b: &Field3d, gamma: f64) -> Result<f64> {
    v.validate()?;
    b.validate()?;
    if v.shape != b.shape || v.spacing != b.spacing {
        return Err(Error::InvalidInput("V and B must share one 3D grid".into()));
    }
    if let Some(x) = b.values.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidInput(format!("field strength must be non-negative (found {x})")));
    }
    let p = gamma + 1.5;
    let l3 = classical_constant(gamma, 3)?;
    let integral = v.integrate(|k, vk| {
        let bk = b.values[k];
        (-(vk + bk)).max(0.0).powf(p) + (-(vk - bk)).max(0.0).powf(p)
    });
    Ok(l3 * integral)
}
