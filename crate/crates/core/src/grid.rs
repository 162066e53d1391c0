use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Log-uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    /// 10001 points on `[1e-6, 1e6]`.
    fn default() -> Self {
        Self {
            x_min: 1e-6,
            x_max: 1e6,
            points: 10_001,
        }
    }
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        let grid = Self {
            x_min,
            x_max,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite and positive, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.x_min >= self.x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min must be below x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn straddles_one(&self) -> bool {
        self.x_min < 1.0 && 1.0 < self.x_max
    }

    /// The `i`-th point; the end points are returned exactly.
    pub fn point(&self, i: usize) -> f64 {
        let last = self.points - 1;
        if i == 0 {
            return self.x_min;
        }
        if i >= last {
            return self.x_max;
        }
        let (lo, hi) = (self.x_min.ln(), self.x_max.ln());
        (lo + (hi - lo) * i as f64 / last as f64).exp()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.point(i))
    }
}
