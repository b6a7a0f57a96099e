//! Test potentials: analytic specifications and their sampled form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid};
use crate::linalg::{self, c, CMat};
use crate::quadrature;

/// Default sampling step used by [`build_potential`].
pub const DEFAULT_SPACING: f64 = 1e-3;

/// Number of zero-valued nodes kept on each side of the support.
pub const PAD_NODES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Smooth,
    PiecewiseConstant,
}

/// Compact envelope `(1 - t^2)^3`, `t = (x - center)/half_width`; C² at the edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(default)]
    pub center: f64,
    #[serde(default = "one")]
    pub half_width: f64,
}

impl Default for Envelope {
    fn default() -> Self {
        Self {
            center: 0.0,
            half_width: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

impl Envelope {
    pub fn value(&self, x: f64) -> f64 {
        bump_profile((x - self.center) / self.half_width)
    }
}

/// `(1 - t^2)^3` on `|t| < 1`, zero outside.
pub fn bump_profile(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - t * t;
        s * s * s
    }
}

/// C² taper: 1 on `|t| <= 1 - TAPER`, smootherstep down to 0 at `|t| = 1`.
pub fn taper_profile(t: f64) -> f64 {
    const TAPER: f64 = 0.25;
    let a = t.abs();
    if a >= 1.0 {
        0.0
    } else if a <= 1.0 - TAPER {
        1.0
    } else {
        let s = (1.0 - a) / TAPER;
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

/// Declarative description of a potential. Wells use a positive depth or
/// amplitude for an attractive (negative) potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Zero {
        #[serde(default = "one_usize")]
        n: usize,
        #[serde(default = "minus_one")]
        x_min: f64,
        #[serde(default = "one")]
        x_max: f64,
    },
    /// `-depth` on `[left, left + width]`.
    SquareWell {
        depth: f64,
        width: f64,
        #[serde(default)]
        left: f64,
    },
    /// `-amplitude (1 - ((x - center)/width)^2)^3`.
    Bump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `-amplitude exp(-(x-center)^2 / (2 width^2))`, C²-tapered to zero at `|x - center| = cutoff`.
    TruncatedGaussian {
        amplitude: f64,
        width: f64,
        cutoff: f64,
        #[serde(default)]
        center: f64,
    },
    ScalarTimesIdentity {
        scalar: Box<PotentialSpec>,
        n: usize,
    },
    /// `amplitude * env(x) * (H0 + t H1 + P2(t) H2)` with Hermitian `H_j`
    /// drawn from a seeded ChaCha20 stream.
    RandomHermitian {
        n: usize,
        seed: u64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        envelope: Envelope,
    },
    Scaled {
        factor: f64,
        inner: Box<PotentialSpec>,
    },
    /// `-(inner)_-`, the non-positive part of `inner`.
    NegativePart {
        inner: Box<PotentialSpec>,
    },
    /// User samples: `re[i]` (and optionally `im[i]`) is the row-major `n x n`
    /// matrix at `x_start + i * spacing`.
    Sampled {
        n: usize,
        x_start: f64,
        spacing: f64,
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
        #[serde(default = "yes")]
        smooth: bool,
    },
}

fn one_usize() -> usize {
    1
}
fn minus_one() -> f64 {
    -1.0
}
fn yes() -> bool {
    true
}

/// Which one-sided limit to take at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Center,
    Right,
}

impl PotentialSpec {
    pub fn square_well(depth: f64, width: f64) -> Self {
        Self::SquareWell {
            depth,
            width,
            left: 0.0,
        }
    }

    pub fn bump(amplitude: f64, width: f64) -> Self {
        Self::Bump {
            amplitude,
            width,
            center: 0.0,
        }
    }

    pub fn truncated_gaussian(amplitude: f64, width: f64, cutoff: f64) -> Self {
        Self::TruncatedGaussian {
            amplitude,
            width,
            cutoff,
            center: 0.0,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::Zero {
            n,
            x_min: -1.0,
            x_max: 1.0,
        }
    }

    pub fn times_identity(self, n: usize) -> Self {
        Self::ScalarTimesIdentity {
            scalar: Box::new(self),
            n,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn random_hermitian(n: usize, seed: u64, amplitude: f64, envelope: Envelope) -> Self {
        Self::RandomHermitian {
            n,
            seed,
            amplitude,
            envelope,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Zero { n, .. } => *n,
            Self::SquareWell { .. } | Self::Bump { .. } | Self::TruncatedGaussian { .. } => 1,
            Self::ScalarTimesIdentity { n, .. } => *n,
            Self::RandomHermitian { n, .. } => *n,
            Self::Scaled { inner, .. } | Self::NegativePart { inner } => inner.dim(),
            Self::Sampled { n, .. } => *n,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Zero { x_min, x_max, .. } => (*x_min, *x_max),
            Self::SquareWell { width, left, .. } => (*left, left + width),
            Self::Bump { width, center, .. } => (center - width, center + width),
            Self::TruncatedGaussian { cutoff, center, .. } => (center - cutoff, center + cutoff),
            Self::ScalarTimesIdentity { scalar, .. } => scalar.support(),
            Self::RandomHermitian { envelope, .. } => (
                envelope.center - envelope.half_width,
                envelope.center + envelope.half_width,
            ),
            Self::Scaled { inner, .. } | Self::NegativePart { inner } => inner.support(),
            Self::Sampled {
                x_start,
                spacing,
                re,
                ..
            } => (*x_start, x_start + spacing * (re.len().max(1) - 1) as f64),
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            Self::SquareWell { .. } => Smoothness::PiecewiseConstant,
            Self::Sampled { smooth: false, .. } => Smoothness::PiecewiseConstant,
            Self::ScalarTimesIdentity { scalar, .. } => scalar.smoothness(),
            Self::Scaled { inner, .. } | Self::NegativePart { inner } => inner.smoothness(),
            _ => Smoothness::Smooth,
        }
    }

    /// Structural checks; numeric Hermiticity of samples is checked on build.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        let finite_pos = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("{name} must be positive (got {v})")))
            }
        };
        match self {
            Self::Zero { n, x_min, x_max } => {
                if *n == 0 {
                    return bad("internal dimension must be at least 1".into());
                }
                if !(x_min < x_max) {
                    return bad(format!("zero-width support [{x_min}, {x_max}]"));
                }
            }
            Self::SquareWell { depth, width, left } => {
                finite_pos("depth", *depth)?;
                finite_pos("width", *width)?;
                if !left.is_finite() {
                    return bad("left edge must be finite".into());
                }
            }
            Self::Bump {
                amplitude, width, ..
            } => {
                if !amplitude.is_finite() {
                    return bad("amplitude must be finite".into());
                }
                finite_pos("width", *width)?;
            }
            Self::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
                ..
            } => {
                if !amplitude.is_finite() {
                    return bad("amplitude must be finite".into());
                }
                finite_pos("width", *width)?;
                finite_pos("cutoff", *cutoff)?;
            }
            Self::ScalarTimesIdentity { scalar, n } => {
                if *n == 0 {
                    return bad("internal dimension must be at least 1".into());
                }
                if scalar.dim() != 1 {
                    return bad("scalar_times_identity needs a scalar inner potential".into());
                }
                scalar.validate()?;
            }
            Self::RandomHermitian {
                n,
                amplitude,
                envelope,
                ..
            } => {
                if *n == 0 {
                    return bad("internal dimension must be at least 1".into());
                }
                if !amplitude.is_finite() {
                    return bad("amplitude must be finite".into());
                }
                finite_pos("envelope half_width", envelope.half_width)?;
            }
            Self::Scaled { factor, inner } => {
                if !factor.is_finite() {
                    return bad("scale factor must be finite".into());
                }
                inner.validate()?;
            }
            Self::NegativePart { inner } => inner.validate()?,
            Self::Sampled {
                n,
                x_start,
                spacing,
                re,
                im,
                ..
            } => {
                if *n == 0 {
                    return bad("internal dimension must be at least 1".into());
                }
                finite_pos("spacing", *spacing)?;
                if !x_start.is_finite() {
                    return bad("x_start must be finite".into());
                }
                if re.len() < 2 {
                    return bad("zero-width support: need at least two samples".into());
                }
                if re.iter().any(|row| row.len() != n * n) {
                    return bad(format!("every sample must hold {} entries", n * n));
                }
                if let Some(im) = im {
                    if im.len() != re.len() || im.iter().any(|row| row.len() != n * n) {
                        return bad("imaginary samples must match the real samples".into());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> CMat {
        self.eval_side(x, Side::Center)
    }

    /// Value at `x`; at a jump of a piecewise-constant potential `side`
    /// selects the one-sided limit.
    pub fn eval_side(&self, x: f64, side: Side) -> CMat {
        match self {
            Self::Zero { n, .. } => CMat::zeros(*n, *n),
            Self::SquareWell { depth, width, left } => {
                let right = left + width;
                let inside = match side {
                    Side::Center => x >= *left && x <= right,
                    Side::Left => x > *left && x <= right,
                    Side::Right => x >= *left && x < right,
                };
                scalar(if inside { -depth } else { 0.0 })
            }
            Self::Bump {
                amplitude,
                width,
                center,
            } => scalar(-amplitude * bump_profile((x - center) / width)),
            Self::TruncatedGaussian {
                amplitude,
                width,
                cutoff,
                center,
            } => {
                let t = x - center;
                let g = (-t * t / (2.0 * width * width)).exp();
                scalar(-amplitude * g * taper_profile(t / cutoff))
            }
            Self::ScalarTimesIdentity { scalar: s, n } => {
                let v = s.eval_side(x, side)[(0, 0)];
                CMat::from_diagonal_element(*n, *n, v)
            }
            Self::RandomHermitian {
                n,
                seed,
                amplitude,
                envelope,
            } => {
                let env = envelope.value(x);
                if env == 0.0 {
                    return CMat::zeros(*n, *n);
                }
                let t = (x - envelope.center) / envelope.half_width;
                let [h0, h1, h2] = random_coefficients(*n, *seed);
                let p2 = 0.5 * (3.0 * t * t - 1.0);
                (h0 + h1.scale(t) + h2.scale(p2)).scale(amplitude * env)
            }
            Self::Scaled { factor, inner } => inner.eval_side(x, side).scale(*factor),
            Self::NegativePart { inner } => {
                let v = inner.eval_side(x, side);
                let v = (&v + v.adjoint()).scale(0.5);
                -linalg::hermitian_function(&v, |l| (-l).max(0.0))
            }
            Self::Sampled {
                n,
                x_start,
                spacing,
                re,
                im,
                smooth,
            } => eval_sampled(*n, *x_start, *spacing, re, im.as_deref(), *smooth, x, side),
        }
    }

    /// Exact average of a piecewise-constant potential over `[x - h/2, x + h/2]`.
    pub fn cell_average(&self, x: f64, h: f64) -> CMat {
        match self {
            Self::SquareWell { depth, width, left } => {
                let lo = (x - 0.5 * h).max(*left);
                let hi = (x + 0.5 * h).min(left + width);
                scalar(-depth * (hi - lo).max(0.0) / h)
            }
            Self::ScalarTimesIdentity { scalar: s, n } => {
                CMat::from_diagonal_element(*n, *n, s.cell_average(x, h)[(0, 0)])
            }
            Self::Scaled { factor, inner } => inner.cell_average(x, h).scale(*factor),
            _ => {
                // midpoint rule on sub-cells, exact away from jumps
                const SUB: usize = 64;
                let mut acc = CMat::zeros(self.dim(), self.dim());
                for s in 0..SUB {
                    let xs = x - 0.5 * h + (s as f64 + 0.5) * h / SUB as f64;
                    acc += self.eval(xs);
                }
                acc.scale(1.0 / SUB as f64)
            }
        }
    }
}

fn scalar(v: f64) -> CMat {
    DMatrix::from_element(1, 1, c(v, 0.0))
}

fn random_coefficients(n: usize, seed: u64) -> [CMat; 3] {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || {
        let g = CMat::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            c(re * scale, im * scale)
        });
        (&g + g.adjoint()).scale(0.5)
    };
    let h0 = draw();
    let h1 = draw();
    let h2 = draw();
    [h0, h1, h2]
}

#[allow(clippy::too_many_arguments)]
fn eval_sampled(
    n: usize,
    x_start: f64,
    spacing: f64,
    re: &[Vec<f64>],
    im: Option<&[Vec<f64>]>,
    smooth: bool,
    x: f64,
    side: Side,
) -> CMat {
    let count = re.len() as isize;
    let sample = |i: isize| -> CMat {
        if i < 0 || i >= count {
            return CMat::zeros(n, n);
        }
        let i = i as usize;
        CMat::from_fn(n, n, |r, col| {
            let k = r * n + col;
            c(re[i][k], im.map_or(0.0, |m| m[i][k]))
        })
    };
    let s = (x - x_start) / spacing;
    let last = (count - 1) as f64;
    if s < -1e-9 || s > last + 1e-9 {
        return CMat::zeros(n, n);
    }
    if !smooth {
        let nudge = match side {
            Side::Left => -1e-9,
            Side::Right => 1e-9,
            Side::Center => 0.0,
        };
        return sample((s + nudge).round() as isize);
    }
    // cubic Lagrange through the four nearest samples
    if count < 4 {
        let i0 = (s.floor() as isize).clamp(0, count - 2);
        let t = s - i0 as f64;
        return sample(i0).scale(1.0 - t) + sample(i0 + 1).scale(t);
    }
    let i0 = (s.floor() as isize).clamp(1, count - 3);
    let t = s - i0 as f64;
    let w = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ];
    let mut out = CMat::zeros(n, n);
    for (j, wj) in w.iter().enumerate() {
        if *wj != 0.0 {
            out += sample(i0 - 1 + j as isize).scale(*wj);
        }
    }
    out
}

/// Values needed by one fixed RK4 step across `[x_i, x_{i+1}]`.
#[derive(Debug, Clone)]
pub(crate) struct StepValues {
    pub lo: CMat,
    pub mid: CMat,
    pub hi: CMat,
}

/// Cached spectra of `V(x)` for repeated spectral integrals `∫ f(spec V(x)) dx`.
#[derive(Debug, Clone)]
pub struct PointwiseEigenvalues {
    values: Vec<Vec<f64>>,
    spacing: f64,
    smoothness: Smoothness,
}

impl PointwiseEigenvalues {
    /// Same rule as [`MatrixPotential::integrate`].
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let h = self.spacing;
        match self.smoothness {
            Smoothness::Smooth => {
                let v: Vec<f64> = self.values.iter().map(|e| f(e)).collect();
                quadrature::simpson(&v, h)
            }
            Smoothness::PiecewiseConstant => self
                .values
                .chunks(2)
                .map(|p| 0.5 * h * (f(&p[0]) + f(&p[1])))
                .sum(),
        }
    }

    /// Largest `|λ|` over all points.
    pub fn sup(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// Compactly supported Hermitian matrix potential sampled on a uniform grid
/// whose nodes include both ends of the support.
#[derive(Debug, Clone)]
pub struct MatrixPotential {
    spec: PotentialSpec,
    dim: usize,
    support: (f64, f64),
    grid: Grid,
    samples: Vec<CMat>,
    smoothness: Smoothness,
    steps: Vec<StepValues>,
}

pub fn build_potential(spec: &PotentialSpec) -> Result<MatrixPotential> {
    build_potential_with_spacing(spec, DEFAULT_SPACING)
}

/// Samples `spec` with a step no larger than `spacing`, adjusted so the
/// support holds a whole number of steps.
pub fn build_potential_with_spacing(spec: &PotentialSpec, spacing: f64) -> Result<MatrixPotential> {
    spec.validate()?;
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidInput(format!("spacing must be positive (got {spacing})")));
    }
    let (x_min, x_max) = spec.support();
    if !(x_min < x_max) {
        return Err(Error::InvalidInput(format!("zero-width support [{x_min}, {x_max}]")));
    }
    let cells = ((x_max - x_min) / spacing).ceil().max(1.0) as usize;
    let h = (x_max - x_min) / cells as f64;
    let pad = PAD_NODES as f64 * h;
    let grid = make_grid(x_min - pad, x_max + pad, cells + 1 + 2 * PAD_NODES)?;
    let node = |i: usize| -> f64 {
        // keep support edges exactly on nodes
        if i == PAD_NODES {
            x_min
        } else if i == PAD_NODES + cells {
            x_max
        } else {
            x_min + (i as f64 - PAD_NODES as f64) * h
        }
    };
    let inside = |i: usize| i >= PAD_NODES && i <= PAD_NODES + cells;
    let n = spec.dim();
    let mut samples = Vec::with_capacity(grid.n_points());
    for i in 0..grid.n_points() {
        if inside(i) {
            let v = spec.eval(node(i));
            samples.push(linalg::symmetrize(&v)?);
        } else {
            samples.push(CMat::zeros(n, n));
        }
    }
    let smoothness = spec.smoothness();
    let steps = (0..grid.n_points() - 1)
        .map(|i| {
            let (xl, xr) = (node(i), node(i + 1));
            let sym = |m: CMat| (&m + m.adjoint()).scale(0.5);
            match smoothness {
                Smoothness::Smooth => StepValues {
                    lo: samples[i].clone(),
                    mid: sym(spec.eval(0.5 * (xl + xr))),
                    hi: samples[i + 1].clone(),
                },
                Smoothness::PiecewiseConstant => StepValues {
                    lo: sym(spec.eval_side(xl, Side::Right)),
                    mid: sym(spec.eval(0.5 * (xl + xr))),
                    hi: sym(spec.eval_side(xr, Side::Left)),
                },
            }
        })
        .collect();
    Ok(MatrixPotential {
        spec: spec.clone(),
        dim: n,
        support: (x_min, x_max),
        grid,
        samples,
        smoothness,
        steps,
    })
}

impl MatrixPotential {
    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing()
    }

    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub(crate) fn steps(&self) -> &[StepValues] {
        &self.steps
    }

    /// Node coordinate, with the support edges pinned exactly.
    pub fn x(&self, i: usize) -> f64 {
        let cells = self.grid.n_points() - 1 - 2 * PAD_NODES;
        if i == PAD_NODES {
            self.support.0
        } else if i == PAD_NODES + cells {
            self.support.1
        } else {
            self.support.0 + (i as f64 - PAD_NODES as f64) * self.grid.spacing()
        }
    }

    /// Index of the node at `x_min`.
    pub fn support_start_index(&self) -> usize {
        PAD_NODES
    }

    /// Index of the node at `x_max`.
    pub fn support_end_index(&self) -> usize {
        self.grid.n_points() - 1 - PAD_NODES
    }

    pub fn eval(&self, x: f64) -> CMat {
        let (lo, hi) = self.support;
        if x < lo || x > hi {
            return CMat::zeros(self.dim, self.dim);
        }
        let v = self.spec.eval(x);
        (&v + v.adjoint()).scale(0.5)
    }

    /// Value used by finite-difference assembly at node `x` with step `h`:
    /// the point value for smooth potentials, the exact cell average otherwise.
    pub fn fd_value(&self, x: f64, h: f64) -> CMat {
        match self.smoothness {
            Smoothness::Smooth => self.eval(x),
            Smoothness::PiecewiseConstant => {
                let v = self.spec.cell_average(x, h);
                (&v + v.adjoint()).scale(0.5)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|m| linalg::max_abs(m) == 0.0)
    }

    /// `sup_x ||V(x)||` over the samples (spectral norm).
    pub fn sup_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(linalg::hermitian_norm)
            .fold(0.0, f64::max)
    }

    /// Whether `V(x) <= 0` at every sample.
    pub fn is_nonpositive(&self) -> bool {
        self.samples.iter().all(|m| {
            linalg::hermitian_eigenvalues(m)
                .last()
                .is_none_or(|&l| l <= 1e-14)
        })
    }

    /// `∫ f(V(x)) dx`: composite Simpson on the samples for smooth potentials,
    /// panel-wise trapezoid with one-sided values for piecewise-constant ones.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&CMat) -> f64,
    {
        let h = self.grid.spacing();
        match self.smoothness {
            Smoothness::Smooth => {
                let values: Vec<f64> = self.samples.iter().map(&f).collect();
                quadrature::simpson(&values, h)
            }
            Smoothness::PiecewiseConstant => self
                .steps
                .iter()
                .map(|s| 0.5 * h * (f(&s.lo) + f(&s.hi)))
                .sum(),
        }
    }

    /// Eigenvalues of `V` at every quadrature point of [`Self::integrate`].
    pub fn pointwise_eigenvalues(&self) -> PointwiseEigenvalues {
        let eig = |m: &CMat| linalg::hermitian_eigenvalues(m);
        let values = match self.smoothness {
            Smoothness::Smooth => self.samples.iter().map(eig).collect(),
            Smoothness::PiecewiseConstant => self.steps.iter().flat_map(|s| [eig(&s.lo), eig(&s.hi)]).collect(),
        };
        PointwiseEigenvalues {
            values,
            spacing: self.grid.spacing(),
            smoothness: self.smoothness,
        }
    }

    pub fn integral_trace(&self) -> f64 {
        self.integrate(|v| v.trace().re)
    }

    pub fn integral_trace_sq(&self) -> f64 {
        self.integrate(|v| (v * v).trace().re)
    }

    pub fn integral_trace_cube(&self) -> f64 {
        self.integrate(|v| (v * v * v).trace().re)
    }

    /// `∫ tr V_-^p dx`.
    pub fn integral_negative_part_pow(&self, p: f64) -> f64 {
        self.integrate(|v| linalg::trace_negative_part_pow(v, p))
    }

    /// `∫ V dx` as a matrix.
    pub fn integral_matrix(&self) -> CMat {
        let h = self.grid.spacing();
        let n = self.dim;
        let mut out = CMat::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                let re: Vec<f64> = self.samples.iter().map(|m| m[(r, col)].re).collect();
                let im: Vec<f64> = self.samples.iter().map(|m| m[(r, col)].im).collect();
                out[(r, col)] = match self.smoothness {
                    Smoothness::Smooth => {
                        c(quadrature::simpson(&re, h), quadrature::simpson(&im, h))
                    }
                    Smoothness::PiecewiseConstant => self
                        .steps
                        .iter()
                        .map(|s| (s.lo[(r, col)] + s.hi[(r, col)]) * (0.5 * h))
                        .sum::<Complex64>(),
                };
            }
        }
        out
    }

    /// `dV/dx` at the nodes by fourth-order central differences.
    pub fn derivative_samples(&self) -> Vec<CMat> {
        let h = self.grid.spacing();
        let n = self.dim;
        let zero = CMat::zeros(n, n);
        let count = self.samples.len() as isize;
        let at = |i: isize| -> &CMat {
            if i < 0 || i >= count {
                &zero
            } else {
                &self.samples[i as usize]
            }
        };
        (0..count)
            .map(|i| {
                (at(i - 2) - at(i - 1).scale(8.0) + at(i + 1).scale(8.0) - at(i + 2))
                    .scale(1.0 / (12.0 * h))
            })
            .collect()
    }

    /// `∫ tr (dV/dx)^2 dx` from the finite-difference derivative.
    pub fn integral_trace_derivative_sq(&self) -> f64 {
        let d = self.derivative_samples();
        let values: Vec<f64> = d.iter().map(|m| (m * m).trace().re).collect();
        quadrature::simpson(&values, self.grid.spacing())
    }
}
