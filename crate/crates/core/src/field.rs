//! Scalar potentials in two and three dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{taper_profile, PotentialSpec, Smoothness};

/// Scalar potential on the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential2dSpec {
    Zero,
    /// `w1(x1) + w2(x2)` with scalar one-dimensional wells, taken on the box.
    Separable {
        first: PotentialSpec,
        second: PotentialSpec,
    },
    /// `-amplitude exp(-r^2 / (2 width^2))`, C²-tapered to zero at `r = cutoff`.
    Gaussian {
        amplitude: f64,
        width: f64,
        cutoff: f64,
        #[serde(default)]
        center: [f64; 2],
    },
}

impl Potential2dSpec {
    pub fn separable(first: PotentialSpec, second: PotentialSpec) -> Self {
        Self::Separable { first, second }
    }

    pub fn gaussian(amplitude: f64, width: f64, cutoff: f64) -> Self {
        Self::Gaussian {
            amplitude,
            width,
            cutoff,
            center: [0.0, 0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Separable { first, second } => {
                for w in [first, second] {
                    w.validate()?;
                    if w.dim() != 1 {
                        return Err(Error::InvalidInput(
                            "separable 2D potentials are built from scalar wells".into(),
                        ));
                    }
                }
                Ok(())
            }
            Self::Gaussian {
                amplitude,
                width,
                cutoff,
                center,
            } => {
                if !(amplitude.is_finite() && center.iter().all(|c| c.is_finite())) {
                    return Err(Error::InvalidInput("gaussian parameters must be finite".into()));
                }
                if !(*width > 0.0 && *cutoff > 0.0) {
                    return Err(Error::InvalidInput(
                        "gaussian width and cutoff must be positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Separable { first, second } => {
                first.eval(x1)[(0, 0)].re + second.eval(x2)[(0, 0)].re
            }
            Self::Gaussian {
                amplitude,
                width,
                cutoff,
                center,
            } => {
                let (d1, d2) = (x1 - center[0], x2 - center[1]);
                let r2 = d1 * d1 + d2 * d2;
                -amplitude * (-r2 / (2.0 * width * width)).exp() * taper_profile(r2.sqrt() / cutoff)
            }
        }
    }

    /// Value used at a grid node of spacing `(h1, h2)`; wells with jumps are cell-averaged.
    pub fn fd_value(&self, x1: f64, x2: f64, h1: f64, h2: f64) -> f64 {
        match self {
            Self::Separable { first, second } => {
                let part = |w: &PotentialSpec, x: f64, h: f64| match w.smoothness() {
                    Smoothness::Smooth => w.eval(x)[(0, 0)].re,
                    Smoothness::PiecewiseConstant => w.cell_average(x, h)[(0, 0)].re,
                };
                part(first, x1, h1) + part(second, x2, h2)
            }
            _ => self.eval(x1, x2),
        }
    }

    /// A box enclosing the support, or the wells' supports for separable potentials.
    pub fn support_box(&self) -> Box2d {
        match self {
            Self::Zero => Box2d::square(1.0),
            Self::Separable { first, second } => Box2d {
                x1: first.support(),
                x2: second.support(),
            },
            Self::Gaussian { cutoff, center, .. } => Box2d {
                x1: (center[0] - cutoff, center[0] + cutoff),
                x2: (center[1] - cutoff, center[1] + cutoff),
            },
        }
    }
}

/// Axis-aligned rectangle `[x1.0, x1.1] x [x2.0, x2.1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2d {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl Box2d {
    pub fn square(half_width: f64) -> Self {
        Self {
            x1: (-half_width, half_width),
            x2: (-half_width, half_width),
        }
    }

    pub fn padded(&self, pad: f64) -> Self {
        Self {
            x1: (self.x1.0 - pad, self.x1.1 + pad),
            x2: (self.x2.0 - pad, self.x2.1 + pad),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if ok(self.x1) && ok(self.x2) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("degenerate box {self:?}")))
        }
    }
}

/// Scalar samples on a uniform 3D grid, `values[(i * ny + j) * nz + l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field3d {
    pub shape: [usize; 3],
    pub spacing: [f64; 3],
    pub values: Vec<f64>,
}

impl Field3d {
    pub fn from_fn(shape: [usize; 3], origin: [f64; 3], spacing: [f64; 3], f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(shape.iter().product());
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for l in 0..shape[2] {
                    values.push(f(
                        origin[0] + i as f64 * spacing[0],
                        origin[1] + j as f64 * spacing[1],
                        origin[2] + l as f64 * spacing[2],
                    ));
                }
            }
        }
        Self {
            shape,
            spacing,
            values,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape.iter().any(|&s| s < 2) {
            return Err(Error::InvalidInput("3D fields need at least two nodes per axis".into()));
        }
        if self.spacing.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
            return Err(Error::InvalidInput("3D grid spacing must be positive".into()));
        }
        if self.values.len() != self.shape.iter().product::<usize>() {
            return Err(Error::InvalidInput("3D field size does not match its shape".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("3D field holds non-finite values".into()));
        }
        Ok(())
    }

    /// Composite trapezoid rule of `f(value)` over the grid.
    pub fn integrate(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        let [nx, ny, nz] = self.shape;
        let w = |i: usize, n: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let mut acc = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                for l in 0..nz {
                    let k = (i * ny + j) * nz + l;
                    acc += w(i, nx) * w(j, ny) * w(l, nz) * f(k, self.values[k]);
                }
            }
        }
        acc * self.spacing.iter().product::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_radial_and_tapered() {
        let g = Potential2dSpec::gaussian(2.0, 0.5, 2.0);
        assert!((g.eval(0.0, 0.0) + 2.0).abs() < 1e-15);
        assert!((g.eval(0.3, 0.4) - g.eval(0.5, 0.0)).abs() < 1e-15);
        assert_eq!(g.eval(1.5, 1.5), 0.0);
    }

    #[test]
    fn separable_adds_wells() {
        let s = Potential2dSpec::separable(PotentialSpec::bump(1.0, 1.0), PotentialSpec::bump(2.0, 1.0));
        assert!((s.eval(0.0, 0.0) + 3.0).abs() < 1e-15);
        assert!((s.eval(0.0, 5.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_3d_integrates_constants() {
        let f = Field3d::from_fn([5, 4, 3], [0.0; 3], [0.25, 1.0 / 3.0, 0.5], |_, _, _| 2.0);
        assert!((f.integrate(|_, v| v) - 2.0).abs() < 1e-14);
    }
}
