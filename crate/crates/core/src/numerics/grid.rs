use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[a, b]` into `n` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

/// Builds the grid `x_j = a + j (b - a) / n`, `j = 0..=n`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::new(a, b, n)
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("grid endpoints must be finite"));
        }
        if a >= b {
            return Err(Error::domain(format!("empty interval ({a}, {b})")));
        }
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 cells, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Node `j`. The last node is exactly `b`.
    pub fn node(&self, j: usize) -> f64 {
        if j == self.n {
            self.b
        } else {
            self.a + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }

    /// Mirror image `a + b - x`.
    pub fn reflect(&self, x: f64) -> f64 {
        self.a + self.b - x
    }

    /// Cell index and local coordinate in `[0, 1]` of a point in `[a, b]`.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = ((x - self.a) / self.h()).clamp(0.0, self.n as f64);
        let j = (s.floor() as usize).min(self.n - 1);
        (j, s - j as f64)
    }

    /// Same interval with `factor` times as many cells.
    pub fn refine(&self, factor: usize) -> Result<Grid> {
        Grid::new(self.a, self.b, self.n * factor)
    }

    /// Indices of the nodes lying in `[c, d]`.
    pub fn indices_in(&self, c: f64, d: f64) -> std::ops::RangeInclusive<usize> {
        let h = self.h();
        let tol = 1e-9 * h;
        let lo = ((c - self.a - tol) / h).ceil().max(0.0) as usize;
        let hi = (((d - self.a + tol) / h).floor().max(0.0) as usize).min(self.n);
        lo..=hi
    }
}
