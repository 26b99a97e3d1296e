use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};

/// Orientation of a one-sided operator: `Left` integrates from `a`, `Right`
/// from `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left" | "-" => Ok(Side::Left),
            "right" | "+" => Ok(Side::Right),
            other => Err(Error::Parse(format!("unknown side `{other}`"))),
        }
    }
}

/// Order `α = m + σ` with `m` the integer part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracOrder {
    alpha: f64,
    m: u32,
    sigma: f64,
}

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain(format!("order must be positive, got {alpha}")));
        }
        let m = alpha.floor();
        Ok(Self {
            alpha,
            m: m as u32,
            sigma: alpha - m,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Which endpoint nodes carry a singularity marker.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Singular {
    pub left: bool,
    pub right: bool,
}

impl Singular {
    pub const NONE: Singular = Singular {
        left: false,
        right: false,
    };

    pub fn any(&self) -> bool {
        self.left || self.right
    }

    pub fn union(self, other: Singular) -> Singular {
        Singular {
            left: self.left || other.left,
            right: self.right || other.right,
        }
    }

    pub fn swapped(self) -> Singular {
        Singular {
            left: self.right,
            right: self.left,
        }
    }

    pub fn at(&self, side: Side) -> bool {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

/// Nodal values on a [`Grid`], read as their piecewise-linear interpolant.
///
/// An endpoint node may be flagged singular; it then holds `+inf` and is
/// skipped by anything that needs a finite value there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    singular: Singular,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::with_singular(grid, values, Singular::NONE)
    }

    pub fn with_singular(grid: Grid, mut values: Vec<f64>, singular: Singular) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::domain(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let n = grid.n();
        if singular.left {
            values[0] = f64::INFINITY;
        }
        if singular.right {
            values[n] = f64::INFINITY;
        }
        for (j, v) in values.iter().enumerate() {
            let flagged = (j == 0 && singular.left) || (j == n && singular.right);
            if !flagged && !v.is_finite() {
                return Err(Error::domain(format!("non-finite value at node {j}")));
            }
        }
        Ok(Self {
            grid,
            values,
            singular,
        })
    }

    /// Samples `f`; a non-finite endpoint value becomes a flagged node, a
    /// non-finite interior value is an error.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        let n = grid.n();
        let singular = Singular {
            left: !values[0].is_finite(),
            right: !values[n].is_finite(),
        };
        Self::with_singular(grid, values, singular)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            singular: Singular::NONE,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn singular(&self) -> Singular {
        self.singular
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }

    pub fn is_flagged(&self, j: usize) -> bool {
        (j == 0 && self.singular.left) || (j == self.grid.n() && self.singular.right)
    }

    /// Value of the interpolant at `x`; zero outside `[a, b]`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.grid.a() || x > self.grid.b() {
            return 0.0;
        }
        let (j, t) = self.grid.locate(x);
        if t == 0.0 {
            return self.values[j];
        }
        if t == 1.0 {
            return self.values[j + 1];
        }
        (1.0 - t) * self.values[j] + t * self.values[j + 1]
    }

    /// Largest finite magnitude, flagged nodes excluded.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(j, _)| !self.is_flagged(*j))
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    /// `x -> u(a + b - x)`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
            singular: self.singular.swapped(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| if self.is_flagged(j) { *v } else { k * v })
            .collect();
        Self {
            grid: self.grid,
            values,
            singular: self.singular,
        }
    }

    /// `self + k * other`; flags are merged.
    pub fn axpy(&self, k: f64, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |u, v| u + k * v)
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |u, v| u * v)
    }

    fn zip_with(&self, other: &SampledFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::domain("functions live on different grids"));
        }
        let singular = self.singular.union(other.singular);
        let n = self.grid.n();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(j, (u, v))| {
                let flagged = (j == 0 && singular.left) || (j == n && singular.right);
                if flagged {
                    f64::INFINITY
                } else {
                    f(*u, *v)
                }
            })
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            singular,
        })
    }

    /// Applies `f` to every non-flagged value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| if self.is_flagged(j) { *v } else { f(*v) })
            .collect();
        Self::with_singular(self.grid, values, self.singular)
    }

    /// Samples the interpolant on a grid `factor` times finer.
    ///
    /// Cells next to a flagged node are filled with the power law through the
    /// two nearest finite nodes, so the singular behaviour is carried over.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        let fine = self.grid.refine(factor)?;
        let n = self.grid.n();
        let mut values = Vec::with_capacity(fine.len());
        for jf in 0..=fine.n() {
            let j = jf / factor;
            let r = jf % factor;
            if r == 0 {
                values.push(self.values[j]);
                continue;
            }
            let t = r as f64 / factor as f64;
            let v = if j == 0 && self.singular.left {
                power_fill(self.values[1], self.values[2], t)
            } else if j + 1 == n && self.singular.right {
                power_fill(self.values[n - 1], self.values[n - 2], 1.0 - t)
            } else {
                (1.0 - t) * self.values[j] + t * self.values[j + 1]
            };
            values.push(v);
        }
        Self::with_singular(fine, values, self.singular)
    }

    /// Keeps every `factor`-th node.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        let n = self.grid.n();
        if factor == 0 || !n.is_multiple_of(factor) {
            return Err(Error::domain(format!("cannot coarsen {n} cells by {factor}")));
        }
        let coarse = Grid::new(self.grid.a(), self.grid.b(), n / factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::with_singular(coarse, values, self.singular)
    }
}

/// Value at distance `t` (in cells) from a singular end, given the values
/// one and two cells away.
fn power_fill(v1: f64, v2: f64, t: f64) -> f64 {
    if v1 != 0.0 && v2 != 0.0 && v1.signum() == v2.signum() {
        let gamma = (v2 / v1).ln() / std::f64::consts::LN_2;
        v1 * t.powf(gamma)
    } else {
        v1 + (t - 1.0) * (v2 - v1)
    }
}

/// Samples of a function on the real line, truncated to `[-L, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineFunction {
    grid: Grid,
    values: Vec<f64>,
    decay_checked: bool,
}

impl LineFunction {
    /// `values` are taken at the `values.len()` equispaced nodes of `[-L, L]`.
    pub fn new(half_width: f64, values: Vec<f64>) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::domain("half width must be positive"));
        }
        if values.len() < 3 {
            return Err(Error::domain("need at least 3 samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("line samples must be finite"));
        }
        let grid = Grid::new(-half_width, half_width, values.len() - 1)?;
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ends = values[0].abs().max(values[values.len() - 1].abs());
        let decay_checked = ends <= 1e-8 * max || max == 0.0;
        Ok(Self {
            grid,
            values,
            decay_checked,
        })
    }

    /// Samples `f` on `n` cells of `[-L, L]`.
    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let grid = Grid::new(-half_width, half_width, n)?;
        Self::new(half_width, grid.nodes().into_iter().map(f).collect())
    }

    pub fn half_width(&self) -> f64 {
        self.grid.b()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when both end samples are below `1e-8` of the peak.
    pub fn decay_checked(&self) -> bool {
        self.decay_checked
    }

    pub fn as_sampled(&self) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.clone(),
            singular: Singular::NONE,
        }
    }

    pub fn from_sampled(u: &SampledFunction) -> Result<Self> {
        if u.grid().a() != -u.grid().b() {
            return Err(Error::domain("line grid must be symmetric about 0"));
        }
        Self::new(u.grid().b(), u.values().to_vec())
    }

    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
            decay_checked: self.decay_checked,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| k * v).collect(),
            decay_checked: self.decay_checked,
        }
    }

    pub fn axpy(&self, k: f64, other: &LineFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::domain("functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u + k * v)
            .collect();
        Self::new(self.half_width(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn frac_order_split() {
        let o = FracOrder::new(2.75).unwrap();
        assert_eq!((o.m(), o.sigma()), (2, 0.75));
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(-1.0).is_err());
    }

    #[test]
    fn endpoint_singularity_is_flagged() {
        let g = uniform_grid(0.0, 1.0, 4).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap();
        assert!(u.singular().left && !u.singular().right);
        assert_eq!(u.value(0), f64::INFINITY);
        assert_eq!(u.value(1), 2.0);
    }

    #[test]
    fn interior_singularity_rejected() {
        let g = uniform_grid(0.0, 1.0, 4).unwrap();
        assert!(SampledFunction::from_fn(g, |x| 1.0 / (x - 0.5)).is_err());
    }

    #[test]
    fn reflection_swaps_flags() {
        let g = uniform_grid(0.0, 1.0, 4).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap().reflect();
        assert!(u.singular().right && !u.singular().left);
        assert_eq!(u.value(3), 2.0);
    }

    #[test]
    fn refine_keeps_linear_interpolant() {
        let g = uniform_grid(0.0, 1.0, 4).unwrap();
        let u = SampledFunction::from_fn(g, |x| 3.0 * x - 1.0).unwrap();
        let f = u.refine(4).unwrap();
        for (x, v) in f.grid().nodes().iter().zip(f.values()) {
            assert!((v - (3.0 * x - 1.0)).abs() < 1e-14);
        }
        assert_eq!(f.coarsen(4).unwrap(), u);
    }

    #[test]
    fn refine_uses_power_law_next_to_singular_node() {
        let g = uniform_grid(0.0, 1.0, 8).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap();
        let f = u.refine(2).unwrap();
        let x = f.grid().node(1);
        assert!((f.value(1) - x.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn line_decay_flag() {
        let u = LineFunction::from_fn(16.0, 256, |x| (-x * x / 2.0).exp()).unwrap();
        assert!(u.decay_checked());
        let v = LineFunction::from_fn(16.0, 256, |x| 1.0 / (1.0 + x * x)).unwrap();
        assert!(!v.decay_checked());
    }
}
