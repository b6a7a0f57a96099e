//! Matrix Jost solutions of `-Y'' + V Y = k^2 Y`.
//!
//! The right solution `F` is integrated in the gauge `T = e^{-ikx} F`, which
//! satisfies `T'' + 2ik T' - V T = 0` with `T = I`, `T' = 0` right of the
//! support; the left solution `G` uses `U = e^{ikx} G`. The free part is then
//! reproduced exactly and, on the imaginary axis, the homogeneous mode decays
//! in the direction of integration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::potential::{MatrixPotential, Smoothness};

/// Smallest admissible `|k|`.
pub const MIN_ABS_K: f64 = 1e-3;

/// Default residual tolerance for [`jost_solve`].
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `F(x, k) = e^{ikx} I` for `x >= x_max`, integrated downward.
    FromPlusInfinity,
    /// `G(x, k) = e^{-ikx} I` for `x <= x_min`, integrated upward.
    FromMinusInfinity,
}

impl Direction {
    /// `+1` for `F`, `-1` for `G`: the solution is `e^{sign * ikx}` times the gauge part.
    fn sign(self) -> f64 {
        match self {
            Direction::FromPlusInfinity => 1.0,
            Direction::FromMinusInfinity => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JostSolution {
    k: Complex64,
    direction: Direction,
    nodes: Vec<f64>,
    spacing: f64,
    support: (f64, f64),
    gauge: Vec<CMat>,
    gauge_derivative: Vec<CMat>,
    residual: f64,
}

impl JostSolution {
    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Support `[x_min, x_max]` of the potential.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `e^{-ikx} F` (or `e^{ikx} G`) at the nodes.
    pub fn gauge_values(&self) -> &[CMat] {
        &self.gauge
    }

    pub fn gauge_derivatives(&self) -> &[CMat] {
        &self.gauge_derivative
    }

    /// Largest normalized stencil residual found by the consistency check.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    fn phase(&self, i: usize) -> Complex64 {
        (c(0.0, self.direction.sign()) * self.k * self.nodes[i]).exp()
    }

    /// The solution at node `i`.
    pub fn value(&self, i: usize) -> CMat {
        self.gauge[i].map(|z| z * self.phase(i))
    }

    /// The x-derivative of the solution at node `i`.
    pub fn derivative(&self, i: usize) -> CMat {
        let ik = c(0.0, self.direction.sign()) * self.k;
        let d = self.gauge[i].map(|z| z * ik) + &self.gauge_derivative[i];
        d.map(|z| z * self.phase(i))
    }

    pub fn values(&self) -> Vec<CMat> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn derivatives(&self) -> Vec<CMat> {
        (0..self.len()).map(|i| self.derivative(i)).collect()
    }

    /// Index of the node equal to `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let x0 = self.nodes[0];
        let i = ((x - x0) / self.spacing).round();
        if i < 0.0 || i as usize >= self.len() {
            return None;
        }
        let i = i as usize;
        ((self.nodes[i] - x).abs() <= 1e-9 * self.spacing).then_some(i)
    }
}

pub(crate) fn check_k(k: Complex64) -> Result<()> {
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::InvalidInput(format!("k must be finite (got {k})")));
    }
    if k.norm() < MIN_ABS_K {
        return Err(Error::InvalidInput(format!(
            "|k| must be at least {MIN_ABS_K} (got {k}); k = 0 is excluded"
        )));
    }
    if k.im < 0.0 {
        return Err(Error::InvalidInput(format!(
            "Jost solutions are only evaluated for Im k >= 0 (got {k})"
        )));
    }
    Ok(())
}

/// Solves for the Jost solution in `direction` on the potential's grid.
///
/// The fixed-step RK4 result is re-inserted into a Numerov stencil; the
/// residual is normalized by `h^2 (1 + |k|^2 + ||V||) max ||Y||` over the
/// stencil and must not exceed `10 * tol`.
pub fn jost_solve(
    v: &MatrixPotential,
    k: Complex64,
    direction: Direction,
    tol: f64,
) -> Result<JostSolution> {
    check_k(k)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive (got {tol})")));
    }
    let (gauge, gauge_derivative) = integrate(v, k, direction)?;
    let nodes: Vec<f64> = (0..v.grid().n_points()).map(|i| v.x(i)).collect();
    let mut sol = JostSolution {
        k,
        direction,
        nodes,
        spacing: v.spacing(),
        support: v.support(),
        gauge,
        gauge_derivative,
        residual: 0.0,
    };
    sol.residual = stencil_residual(v, &sol);
    let limit = 10.0 * tol;
    if sol.residual > limit {
        return Err(Error::ToleranceNotMet {
            residual: sol.residual,
            limit,
        });
    }
    Ok(sol)
}

/// `T(x, k) = e^{-ikx} F(x, k)` at the grid nodes.
pub fn t_matrix(v: &MatrixPotential, k: Complex64) -> Result<Vec<CMat>> {
    Ok(jost_solve(v, k, Direction::FromPlusInfinity, DEFAULT_TOL)?.gauge)
}

type Gauge = (Vec<CMat>, Vec<CMat>);

fn integrate(v: &MatrixPotential, k: Complex64, direction: Direction) -> Result<Gauge> {
    let n = v.dim();
    let count = v.grid().n_points();
    let h = v.spacing();
    let steps = v.steps();
    // gauge equation: Z'' = drift Z' + V Z
    let drift = c(0.0, -2.0 * direction.sign()) * k;
    let mut z = vec![CMat::zeros(n, n); count];
    let mut zp = vec![CMat::zeros(n, n); count];
    let (start, dx) = match direction {
        Direction::FromPlusInfinity => (count - 1, -h),
        Direction::FromMinusInfinity => (0, h),
    };
    z[start] = linalg::identity(n);
    let rhs = |vm: &CMat, y: &CMat, p: &CMat| -> CMat { p * drift + vm * y };
    let mut y = z[start].clone();
    let mut p = zp[start].clone();
    for s in 0..count - 1 {
        let (from, to, va, vb) = match direction {
            Direction::FromPlusInfinity => {
                let i = count - 2 - s;
                (i + 1, i, &steps[i].hi, &steps[i].lo)
            }
            Direction::FromMinusInfinity => (s, s + 1, &steps[s].lo, &steps[s].hi),
        };
        let vm = &steps[from.min(to)].mid;
        let half = 0.5 * dx;
        let k1y = p.clone();
        let k1p = rhs(va, &y, &p);
        let y2 = &y + &k1y * c(half, 0.0);
        let p2 = &p + &k1p * c(half, 0.0);
        let k2p = rhs(vm, &y2, &p2);
        let y3 = &y + &p2 * c(half, 0.0);
        let p3 = &p + &k2p * c(half, 0.0);
        let k3p = rhs(vm, &y3, &p3);
        let y4 = &y + &p3 * c(dx, 0.0);
        let p4 = &p + &k3p * c(dx, 0.0);
        let k4p = rhs(vb, &y4, &p4);
        let w = c(dx / 6.0, 0.0);
        y += (k1y + p2 * c(2.0, 0.0) + p3 * c(2.0, 0.0) + p4) * w;
        p += (k1p + k2p * c(2.0, 0.0) + k3p * c(2.0, 0.0) + k4p) * w;
        if !(y.iter().chain(p.iter()).all(|e| e.re.is_finite() && e.im.is_finite())) {
            return Err(Error::Integrator(format!(
                "non-finite solution at x = {} (k = {k})",
                v.x(to)
            )));
        }
        z[to].copy_from(&y);
        zp[to].copy_from(&p);
    }
    Ok((z, zp))
}

fn max_abs(m: &CMat) -> f64 {
    linalg::max_abs(m)
}

fn stencil_residual(v: &MatrixPotential, sol: &JostSolution) -> f64 {
    let count = sol.len();
    let h = sol.spacing;
    let steps = v.steps();
    let k = sol.k;
    let k2 = k * k;
    let sign = sol.direction.sign();
    let jump = |i: usize| -> bool {
        v.smoothness() == Smoothness::PiecewiseConstant
            && i > 0
            && i + 1 < count
            && steps[i - 1].hi != steps[i].lo
    };
    let samples = v.samples();
    let mut worst: f64 = 0.0;
    for i in 1..count - 1 {
        if jump(i - 1) || jump(i) || jump(i + 1) {
            continue;
        }
        // solution relative to its value's phase at node i
        let y = |j: usize| -> CMat {
            let ph = (c(0.0, sign) * k * (sol.nodes[j] - sol.nodes[i])).exp();
            sol.gauge[j].map(|z| z * ph)
        };
        let (ym, y0, yp) = (y(i - 1), y(i), y(i + 1));
        let q = |j: usize, yy: &CMat| -> CMat { &samples[j] * yy - yy * k2 };
        let lhs = &yp - &y0 * c(2.0, 0.0) + &ym;
        let rhs = (q(i + 1, &yp) + q(i, &y0) * c(10.0, 0.0) + q(i - 1, &ym)) * c(h * h / 12.0, 0.0);
        let vnorm = max_abs(&samples[i - 1])
            .max(max_abs(&samples[i]))
            .max(max_abs(&samples[i + 1]));
        let ynorm = max_abs(&ym).max(max_abs(&y0)).max(max_abs(&yp));
        let scale = h * h * (1.0 + k2.norm() + vnorm) * ynorm;
        if scale > 0.0 {
            worst = worst.max(max_abs(&(lhs - rhs)) / scale);
        }
    }
    worst
}

/// Exact propagation of `F` across the constant panels of a
/// piecewise-constant potential; returns `(A(k), B(k))`.
pub fn panel_exponential_ab(v: &MatrixPotential, k: Complex64) -> Result<(CMat, CMat)> {
    check_k(k)?;
    if v.smoothness() != Smoothness::PiecewiseConstant {
        return Err(Error::Precondition(
            "panel propagation needs a piecewise-constant potential".into(),
        ));
    }
    let n = v.dim();
    let steps = v.steps();
    let first = v.support_start_index();
    let last = v.support_end_index();
    // merge consecutive cells with equal constant value
    let mut panels: Vec<(f64, f64, CMat)> = Vec::new();
    for i in first..last {
        let val = &steps[i].mid;
        match panels.last_mut() {
            Some((_, right, m)) if m == val => *right = v.x(i + 1),
            _ => panels.push((v.x(i), v.x(i + 1), val.clone())),
        }
    }
    let ik = c(0.0, 1.0) * k;
    let x_max = v.support().1;
    let e = (ik * x_max).exp();
    let mut y = CMat::from_diagonal_element(n, n, e);
    let mut yp = CMat::from_diagonal_element(n, n, ik * e);
    for (left, right, m) in panels.iter().rev() {
        let d = left - right;
        let (vals, vecs) = linalg::hermitian_eigen(m);
        let mut ch = Vec::with_capacity(n);
        let mut sh = Vec::with_capacity(n);
        let mut rsh = Vec::with_capacity(n);
        for &lam in vals.iter() {
            let r = (c(lam, 0.0) - k * k).sqrt();
            let rd = r * d;
            ch.push(rd.cosh());
            sh.push(if rd.norm() < 1e-8 { c(d, 0.0) } else { rd.sinh() / r });
            rsh.push(r * rd.sinh());
        }
        let f = |diag: &[Complex64]| -> CMat {
            &vecs * CMat::from_diagonal(&nalgebra::DVector::from_column_slice(diag)) * vecs.adjoint()
        };
        let (cm, sm, rm) = (f(&ch), f(&sh), f(&rsh));
        let y_new = &cm * &y + &sm * &yp;
        let yp_new = &rm * &y + &cm * &yp;
        y = y_new;
        yp = yp_new;
    }
    let x_min = v.support().0;
    let two_ik = ik * 2.0;
    let a = (&y * ik + &yp) * ((-ik * x_min).exp() / two_ik);
    let b = (&y * ik - &yp) * ((ik * x_min).exp() / two_ik);
    Ok((a, b))
}
