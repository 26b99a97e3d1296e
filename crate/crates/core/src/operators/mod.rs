//! Numerical fractional integrals and derivatives.
//!
//! Left-sided operators act from `a`, right-sided ones from `b`; every
//! right-sided operator is the left-sided one conjugated by the reflection
//! `x -> a + b - x`.

mod difference;
mod grunwald;
mod integral;
mod kernel;
pub(crate) mod line;
mod riemann;
mod singular;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{FracOrder, LineFunction, SampledFunction, Side};

pub use difference::integer_derivative;
pub use grunwald::{gl_derivative, gl_derivative_line};
pub use integral::frac_integral;
pub use kernel::{endpoint_constant, kappa, KernelConstant};
pub use line::{marchaud_derivative, spectral_derivative};
pub use riemann::{caputo_derivative, rl_derivative};

/// A value together with non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

impl<T> Checked<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    ProductRl,
    Grunwald,
    Caputo,
    Marchaud,
    Spectral,
}

impl Realization {
    pub fn as_str(self) -> &'static str {
        match self {
            Realization::ProductRl => "product_rl",
            Realization::Grunwald => "grunwald",
            Realization::Caputo => "caputo",
            Realization::Marchaud => "marchaud",
            Realization::Spectral => "spectral",
        }
    }

    /// Whether the realization acts on functions on the real line.
    pub fn on_line(self) -> bool {
        matches!(self, Realization::Marchaud | Realization::Spectral)
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Realization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rl" | "product_rl" => Ok(Realization::ProductRl),
            "gl" | "grunwald" => Ok(Realization::Grunwald),
            "caputo" => Ok(Realization::Caputo),
            "marchaud" => Ok(Realization::Marchaud),
            "spectral" => Ok(Realization::Spectral),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Order, side and realization of a fractional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub alpha: FracOrder,
    pub side: Side,
    pub realization: Realization,
}

impl OperatorSpec {
    pub fn new(alpha: f64, side: Side, realization: Realization) -> Result<Self> {
        let alpha = FracOrder::new(alpha)?;
        if realization != Realization::ProductRl && realization != Realization::Caputo && alpha.m() > 0 {
            return Err(Error::unsupported(format!(
                "{realization} is implemented for orders below 1 only"
            )));
        }
        Ok(Self {
            alpha,
            side,
            realization,
        })
    }

    /// Applies the operator to a function on an interval.
    pub fn apply(&self, u: &SampledFunction) -> Result<SampledFunction> {
        let a = self.alpha.alpha();
        match self.realization {
            Realization::ProductRl => rl_derivative(u, a, self.side),
            Realization::Grunwald => gl_derivative(u, a, self.side),
            Realization::Caputo => caputo_derivative(u, a, self.side),
            Realization::Marchaud | Realization::Spectral => Err(Error::unsupported(format!(
                "{} acts on functions on the real line",
                self.realization
            ))),
        }
    }

    /// Applies the operator to a function on the real line.
    pub fn apply_line(&self, u: &LineFunction) -> Result<Checked<LineFunction>> {
        let a = self.alpha.alpha();
        match self.realization {
            Realization::Marchaud => marchaud_derivative(u, a, self.side),
            Realization::Spectral => spectral_derivative(u, a, self.side),
            Realization::Grunwald => Ok(Checked::clean(gl_derivative_line(u, a, self.side)?)),
            Realization::ProductRl | Realization::Caputo => Err(Error::unsupported(format!(
                "{} acts on functions on an interval",
                self.realization
            ))),
        }
    }
}

pub(crate) fn check_order(alpha: f64, lo_open: f64, hi: f64, hi_closed: bool) -> Result<()> {
    let ok = alpha.is_finite() && alpha > lo_open && (alpha < hi || (hi_closed && alpha == hi));
    if ok {
        Ok(())
    } else {
        let bracket = if hi_closed { ']' } else { ')' };
        Err(Error::domain(format!(
            "order {alpha} outside ({lo_open}, {hi}{bracket}"
        )))
    }
}

/// Runs a left-sided operator on the reflection for `Side::Right`.
pub(crate) fn by_side(
    u: &SampledFunction,
    side: Side,
    left: impl Fn(&SampledFunction) -> Result<SampledFunction>,
) -> Result<SampledFunction> {
    match side {
        Side::Left => left(u),
        Side::Right => Ok(left(&u.reflect())?.reflect()),
    }
}
