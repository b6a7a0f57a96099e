//! Finite-difference spectra of `-d²/dx² ⊗ I + V` and of `-Δ + v` in a
//! Dirichlet box, with Richardson extrapolation in the grid spacing.

pub mod banded;

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Box2d, Potential2dSpec};
use crate::linalg::CMat;
use crate::potential::MatrixPotential;
use banded::{BandScalar, BandedHermitian};

/// Largest matrix dimension accepted by the finite-difference solvers.
pub const SIZE_LIMIT: usize = 20_000;
/// Relative gap below which eigenvalues are merged into one level.
pub const CLUSTER_RTOL: f64 = 1e-6;
/// Relative accuracy of the computed eigenvalues.
pub const EIGEN_TOL: f64 = 1e-12;
/// Default coarse spacing of the one-dimensional solver.
pub const DEFAULT_SPACING_1D: f64 = 0.005;
/// Upper limit for the automatic Dirichlet padding.
pub const PAD_CAP: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Distinct negative eigenvalues on the finer grid, strictly increasing.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub pad: f64,
    /// Spacing of the finer grid.
    pub grid_spacing: f64,
    /// `(4 λ_{h/2} - λ_h) / 3` for each level.
    pub richardson_estimate: Vec<f64>,
    /// Negative eigenvalues on the coarse grid, repeated by multiplicity.
    pub coarse_eigenvalues: Vec<f64>,
}

impl SpectrumResult {
    pub fn empty(pad: f64, grid_spacing: f64) -> Self {
        Self {
            eigenvalues: Vec::new(),
            multiplicities: Vec::new(),
            pad,
            grid_spacing,
            richardson_estimate: Vec::new(),
            coarse_eigenvalues: Vec::new(),
        }
    }

    /// Builds the result from both resolutions (each ascending, with repeats).
    pub fn from_levels(coarse: Vec<f64>, fine: Vec<f64>, pad: f64, grid_spacing: f64) -> Self {
        let mut out = Self::empty(pad, grid_spacing);
        let extrapolated: Vec<f64> = fine
            .iter()
            .enumerate()
            .map(|(i, &f)| match coarse.get(i) {
                Some(&c) => (4.0 * f - c) / 3.0,
                None => f,
            })
            .collect();
        for (group, members) in cluster(&fine) {
            out.eigenvalues.push(group);
            out.multiplicities.push(members.len());
            let r = members.iter().map(|&i| extrapolated[i]).sum::<f64>() / members.len() as f64;
            out.richardson_estimate.push(r);
        }
        out.coarse_eigenvalues = coarse;
        out
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// `κ = sqrt(-λ)` of the extrapolated levels, decreasing.
    pub fn kappas(&self) -> Vec<f64> {
        self.richardson_estimate.iter().map(|l| (-l).max(0.0).sqrt()).collect()
    }

    /// Finer-grid eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&l, &m)| std::iter::repeat_n(l, m))
            .collect()
    }

    /// `Σ m |λ|^γ` on the finer grid.
    pub fn riesz_mean_fine(&self, gamma: f64) -> f64 {
        power_sum(&self.expanded(), gamma)
    }

    /// `Σ |λ|^γ` on the coarse grid.
    pub fn riesz_mean_coarse(&self, gamma: f64) -> f64 {
        power_sum(&self.coarse_eigenvalues, gamma)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,multiplicity,kappa,richardson_lambda\n");
        for (i, (&l, &m)) in self.eigenvalues.iter().zip(&self.multiplicities).enumerate() {
            let r = self.richardson_estimate[i];
            let _ = writeln!(out, "{},{},{},{}", l, m, (-r).max(0.0).sqrt(), r);
        }
        out
    }
}

/// `Σ |λ|^γ` over the negative entries of `levels`.
pub fn power_sum(levels: &[f64], gamma: f64) -> f64 {
    levels.iter().map(|l| l.min(0.0).abs().powf(gamma)).sum()
}

/// `Σ m_l |λ_l|^γ` over the Richardson-extrapolated levels.
pub fn riesz_mean(s: &SpectrumResult, gamma: f64) -> f64 {
    s.richardson_estimate
        .iter()
        .zip(&s.multiplicities)
        .map(|(l, &m)| m as f64 * l.min(0.0).abs().powf(gamma))
        .sum()
}

/// Groups an ascending list into levels with relative gap at most `CLUSTER_RTOL`.
fn cluster(values: &[f64]) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if let Some((_, members)) = out.last_mut() {
            let prev = values[*members.last().unwrap()];
            if (v - prev).abs() <= CLUSTER_RTOL * v.abs().max(prev.abs()) {
                members.push(i);
                continue;
            }
        }
        out.push((v, vec![i]));
    }
    for (level, members) in out.iter_mut() {
        *level = members.iter().map(|&i| values[i]).sum::<f64>() / members.len() as f64;
    }
    out
}

fn negative_eigenvalues<T: BandScalar>(m: &BandedHermitian<T>) -> Vec<f64> {
    let (lo, _) = m.gershgorin();
    if lo >= 0.0 {
        return Vec::new();
    }
    m.eigenvalues_in(lo - 1e-9 * lo.abs(), 0.0, EIGEN_TOL)
}

/// One-dimensional Dirichlet-box discretization: spacing `h` and `pad_cells`
/// cells on each side of the support.
struct Box1d {
    h: f64,
    x0: f64,
    interior: usize,
}

impl Box1d {
    fn new(v: &MatrixPotential, h: f64, pad_cells: usize) -> Self {
        let (x_min, x_max) = v.support();
        let cells = ((x_max - x_min) / h).round() as usize;
        Self {
            h,
            x0: x_min - pad_cells as f64 * h,
            interior: cells + 2 * pad_cells - 1,
        }
    }

    fn node(&self, i: usize) -> f64 {
        self.x0 + (i + 1) as f64 * self.h
    }
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn assemble_1d<T: BandScalar>(blocks: &[CMat], n: usize, h: f64, conv: impl Fn(Complex64) -> T) -> BandedHermitian<T> {
    let size = blocks.len() * n;
    let mut m = BandedHermitian::<T>::zeros(size, n);
    let kin = 1.0 / (h * h);
    for (i, block) in blocks.iter().enumerate() {
        for a in 0..n {
            let r = i * n + a;
            m.add(r, r, T::from_re(2.0 * kin + block[(a, a)].re));
            for b in 0..a {
                m.add(r, i * n + b, conv(block[(a, b)]));
            }
            if i > 0 {
                m.add(r, r - n, T::from_re(-kin));
            }
        }
    }
    m
}

fn solve_box_1d(v: &MatrixPotential, bx: &Box1d) -> Vec<f64> {
    let n = v.dim();
    let blocks: Vec<CMat> = (0..bx.interior).map(|i| v.fd_value(bx.node(i), bx.h)).collect();
    if blocks.iter().all(is_real) {
        negative_eigenvalues(&assemble_1d::<f64>(&blocks, n, bx.h, |z| z.re))
    } else {
        negative_eigenvalues(&assemble_1d::<Complex64>(&blocks, n, bx.h, |z| z))
    }
}

fn check_size(size: usize) -> Result<()> {
    if size > SIZE_LIMIT {
        Err(Error::SizeGuard {
            size,
            limit: SIZE_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// Solves on spacings `h` and `h/2` where `h` divides the support width.
/// Raising `pad` at fixed `spacing` only adds Dirichlet nodes, so no
/// eigenvalue moves up.
pub fn fd_eigensolve_1d_spacing(v: &MatrixPotential, pad: f64, spacing: f64) -> Result<SpectrumResult> {
    if !(pad.is_finite() && pad > 0.0) {
        return Err(Error::InvalidInput(format!("pad must be positive (got {pad})")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidInput(format!("spacing must be positive (got {spacing})")));
    }
    let (x_min, x_max) = v.support();
    let cells = ((x_max - x_min) / spacing).ceil().max(1.0);
    let h = (x_max - x_min) / cells;
    let pad_cells = (pad / h).ceil().max(1.0) as usize;
    let coarse = Box1d::new(v, h, pad_cells);
    check_size(v.dim() * (coarse.interior + 2))?;
    let fine = Box1d::new(v, 0.5 * h, 2 * pad_cells);
    let pad_used = pad_cells as f64 * h;
    if v.is_zero() {
        return Ok(SpectrumResult::empty(pad_used, 0.5 * h));
    }
    let lc = solve_box_1d(v, &coarse);
    let lf = solve_box_1d(v, &fine);
    Ok(SpectrumResult::from_levels(lc, lf, pad_used, 0.5 * h))
}

/// Negative spectrum in the box `[x_min - pad, x_max + pad]` with `n_points`
/// coarse nodes; the spacing is adjusted so both support edges are nodes.
pub fn fd_eigensolve_1d(v: &MatrixPotential, pad: f64, n_points: usize) -> Result<SpectrumResult> {
    if n_points < 50 {
        return Err(Error::InvalidInput(format!("n_points must be at least 50 (got {n_points})")));
    }
    check_size(v.dim() * n_points)?;
    if !(pad.is_finite() && pad > 0.0) {
        return Err(Error::InvalidInput(format!("pad must be positive (got {pad})")));
    }
    let (x_min, x_max) = v.support();
    let spacing = (x_max - x_min + 2.0 * pad) / (n_points - 1) as f64;
    fd_eigensolve_1d_spacing(v, pad, spacing)
}

/// Padding `8/κ` from the least-bound state, capped at [`PAD_CAP`]; the
/// spacing defaults to [`DEFAULT_SPACING_1D`], coarsened if the size guard
/// would trip.
pub fn fd_eigensolve_1d_auto(v: &MatrixPotential) -> Result<SpectrumResult> {
    fd_eigensolve_1d_resolved(v, DEFAULT_SPACING_1D)
}

/// As [`fd_eigensolve_1d_auto`] with a requested coarse spacing.
pub fn fd_eigensolve_1d_resolved(v: &MatrixPotential, spacing: f64) -> Result<SpectrumResult> {
    let (x_min, x_max) = v.support();
    let width = x_max - x_min;
    let fit = |pad: f64| -> f64 {
        // ceil() on the cell counts adds a few nodes
        let limit = 0.98 * (SIZE_LIMIT / v.dim()) as f64 - 4.0;
        spacing.max((width + 2.0 * pad) / limit)
    };
    // coarse pre-solve for κ_est
    let mut pad = 10.0f64.min(PAD_CAP);
    let probe = fd_eigensolve_1d_spacing(v, pad, fit(pad).max(0.02))?;
    let Some(&top) = probe.richardson_estimate.last() else {
        pad = PAD_CAP;
        return fd_eigensolve_1d_spacing(v, pad, fit(pad));
    };
    let mut kappa = (-top).max(1e-12).sqrt();
    for _ in 0..3 {
        pad = (8.0 / kappa).min(PAD_CAP);
        let s = fd_eigensolve_1d_spacing(v, pad, fit(pad))?;
        let k_new = s.kappas().last().copied().unwrap_or(kappa);
        if k_new >= 0.9 * kappa || pad >= PAD_CAP {
            return Ok(s);
        }
        kappa = k_new;
    }
    fd_eigensolve_1d_spacing(v, pad, fit(pad))
}

/// Nodes of a Dirichlet grid with `n_points` nodes (boundary included).
pub(crate) fn interior_nodes(lo: f64, hi: f64, n_points: usize) -> (Vec<f64>, f64) {
    let h = (hi - lo) / (n_points - 1) as f64;
    ((1..n_points - 1).map(|i| lo + i as f64 * h).collect(), h)
}

fn check_nonpositive(values: &[f64]) -> Result<()> {
    if let Some(v) = values.iter().find(|&&v| v > 1e-14) {
        return Err(Error::InvalidInput(format!(
            "2D potential must be non-positive (found {v})"
        )));
    }
    Ok(())
}

/// 5-point Laplacian plus `v` on interior nodes, `x2`-major ordering.
pub(crate) fn solve_box_2d(v: &Potential2dSpec, bx: &Box2d, n_points: usize) -> Result<Vec<f64>> {
    let (x1, h1) = interior_nodes(bx.x1.0, bx.x1.1, n_points);
    let (x2, h2) = interior_nodes(bx.x2.0, bx.x2.1, n_points);
    let (n1, n2) = (x1.len(), x2.len());
    let mut values = Vec::with_capacity(n1 * n2);
    for &b in &x2 {
        for &a in &x1 {
            values.push(v.fd_value(a, b, h1, h2));
        }
    }
    check_nonpositive(&values)?;
    if values.iter().all(|&x| x == 0.0) {
        return Ok(Vec::new());
    }
    let (k1, k2) = (1.0 / (h1 * h1), 1.0 / (h2 * h2));
    let mut m = BandedHermitian::<f64>::zeros(n1 * n2, n1);
    for j in 0..n2 {
        for i in 0..n1 {
            let r = j * n1 + i;
            m.add(r, r, 2.0 * k1 + 2.0 * k2 + values[r]);
            if i > 0 {
                m.add(r, r - 1, -k1);
            }
            if j > 0 {
                m.add(r, r - n1, -k2);
            }
        }
    }
    Ok(negative_eigenvalues(&m))
}

/// Negative eigenvalues (with repeats) of `-d²/dx² ⊗ I + blocks[i]` on a
/// uniform Dirichlet grid of spacing `h`; real symmetric blocks only.
pub(crate) fn block_operator_eigenvalues(blocks: &[CMat], h: f64) -> Result<Vec<f64>> {
    let Some(first) = blocks.first() else {
        return Ok(Vec::new());
    };
    let n = first.nrows();
    check_size(blocks.len() * n)?;
    if !blocks.iter().all(is_real) {
        return Err(Error::InvalidInput("block operator expects real blocks".into()));
    }
    Ok(negative_eigenvalues(&assemble_1d::<f64>(blocks, n, h, |z| z.re)))
}

/// Fine-grid node count for a coarse grid of `n_points` nodes per axis.
pub fn refined_points(n_points: usize) -> usize {
    2 * n_points - 1
}

/// Negative spectrum of `-Δ + v` on `bx` with Dirichlet walls, on
/// `n_points` and `2 n_points - 1` nodes per axis. The size guard applies
/// to the finer grid.
pub fn fd_eigensolve_2d(v: &Potential2dSpec, bx: &Box2d, n_points: usize) -> Result<SpectrumResult> {
    v.validate()?;
    bx.validate()?;
    if n_points < 5 {
        return Err(Error::InvalidInput("need at least 5 nodes per axis".into()));
    }
    let nf = refined_points(n_points);
    check_size((nf - 2) * (nf - 2))?;
    let lc = solve_box_2d(v, bx, n_points)?;
    let lf = solve_box_2d(v, bx, nf)?;
    let h = (bx.x1.1 - bx.x1.0) / (nf - 1) as f64;
    Ok(SpectrumResult::from_levels(lc, lf, 0.0, h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceOperatorSpectrum {
    pub x_d: f64,
    /// Ascending, all `<= 0`.
    pub negative_eigenvalues: Vec<f64>,
}

/// Discrete slice operator `W(x2) = -d²/dx1² + v(·, x2)` on the `x1` grid.
pub fn slice_operator(v: &Potential2dSpec, bx: &Box2d, n_points: usize, x2: f64) -> DMatrix<f64> {
    let (x1, h1) = interior_nodes(bx.x1.0, bx.x1.1, n_points);
    let h2 = (bx.x2.1 - bx.x2.0) / (n_points - 1) as f64;
    let n = x1.len();
    let k = 1.0 / (h1 * h1);
    let mut w = DMatrix::zeros(n, n);
    for (i, &a) in x1.iter().enumerate() {
        w[(i, i)] = 2.0 * k + v.fd_value(a, x2, h1, h2);
        if i > 0 {
            w[(i, i - 1)] = -k;
            w[(i - 1, i)] = -k;
        }
    }
    w
}

/// Negative eigenvalues of the slice operator at `x2`.
pub fn slice_spectrum(v: &Potential2dSpec, bx: &Box2d, n_points: usize, x2: f64) -> Result<SliceOperatorSpectrum> {
    v.validate()?;
    bx.validate()?;
    if !(x2 >= bx.x2.0 && x2 <= bx.x2.1) {
        return Err(Error::InvalidInput(format!("x2 = {x2} lies outside the box")));
    }
    if n_points < 3 {
        return Err(Error::InvalidInput("need at least 3 nodes per axis".into()));
    }
    check_size(n_points)?;
    let w = slice_operator(v, bx, n_points, x2);
    let eig = SymmetricEigen::new(w);
    let mut neg: Vec<f64> = eig.eigenvalues.iter().copied().filter(|&l| l < 0.0).collect();
    neg.sort_by(f64::total_cmp);
    Ok(SliceOperatorSpectrum {
        x_d: x2,
        negative_eigenvalues: neg,
    })
}
