use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[x_min_pad, x_max_pad]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min_pad: f64,
    x_max_pad: f64,
    n_points: usize,
    spacing: f64,
}

impl Grid {
    pub fn x_min_pad(&self) -> f64 {
        self.x_min_pad
    }

    pub fn x_max_pad(&self) -> f64 {
        self.x_max_pad
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of node `i`. The last node is pinned to `x_max_pad`.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max_pad
        } else {
            self.x_min_pad + i as f64 * self.spacing
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    /// Index of the node closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min_pad) / self.spacing).round();
        (t.max(0.0) as usize).min(self.n_points - 1)
    }
}

pub fn make_grid(x_lo: f64, x_hi: f64, n_points: usize) -> Result<Grid> {
    if !(x_lo.is_finite() && x_hi.is_finite()) || x_lo >= x_hi {
        return Err(Error::InvalidInput(format!(
            "grid endpoints must satisfy x_lo < x_hi (got {x_lo}, {x_hi})"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidInput(format!(
            "a grid needs at least two points (got {n_points})"
        )));
    }
    Ok(Grid {
        x_min_pad: x_lo,
        x_max_pad: x_hi,
        n_points,
        spacing: (x_hi - x_lo) / (n_points - 1) as f64,
    })
}
