//! Lebesgue, fractional Sobolev, Gagliardo and Fourier norms; traces and
//! Hölder quotients.

mod fourier;
mod gagliardo;
mod lp;
mod sobolev;
mod trace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{FracOrder, LineFunction, SampledFunction, Side};

pub use fourier::{fourier_seminorm, spectral_moment};
pub use gagliardo::{gagliardo_seminorm, Seminorm};
pub use lp::{lp_norm, lp_norm_detailed, lp_norm_line};
pub use sobolev::{sobolev_norm, NormValue};
pub use trace::{holder_quotient, is_regular, sobolev_conjugate, trace, TraceValue};

/// A function on an interval or on the line.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Interval(&'a SampledFunction),
    Line(&'a LineFunction),
}

impl<'a> From<&'a SampledFunction> for Operand<'a> {
    fn from(u: &'a SampledFunction) -> Self {
        Operand::Interval(u)
    }
}

impl<'a> From<&'a LineFunction> for Operand<'a> {
    fn from(u: &'a LineFunction) -> Self {
        Operand::Line(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFamily {
    OneSidedLeft,
    OneSidedRight,
    Symmetric,
    ZeroTraceLeft,
    ZeroTraceRight,
    Gagliardo,
    Fourier,
}

impl NormFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            NormFamily::OneSidedLeft => "one_sided_left",
            NormFamily::OneSidedRight => "one_sided_right",
            NormFamily::Symmetric => "symmetric",
            NormFamily::ZeroTraceLeft => "zero_trace_left",
            NormFamily::ZeroTraceRight => "zero_trace_right",
            NormFamily::Gagliardo => "gagliardo",
            NormFamily::Fourier => "fourier",
        }
    }

    pub fn one_sided(side: Side) -> Self {
        match side {
            Side::Left => NormFamily::OneSidedLeft,
            Side::Right => NormFamily::OneSidedRight,
        }
    }

    pub fn zero_trace(side: Side) -> Self {
        match side {
            Side::Left => NormFamily::ZeroTraceLeft,
            Side::Right => NormFamily::ZeroTraceRight,
        }
    }
}

impl fmt::Display for NormFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "one_sided_left" | "left" => NormFamily::OneSidedLeft,
            "one_sided_right" | "right" => NormFamily::OneSidedRight,
            "symmetric" => NormFamily::Symmetric,
            "zero_trace_left" => NormFamily::ZeroTraceLeft,
            "zero_trace_right" => NormFamily::ZeroTraceRight,
            "gagliardo" => NormFamily::Gagliardo,
            "fourier" => NormFamily::Fourier,
            other => return Err(Error::Parse(format!("unknown space `{other}`"))),
        })
    }
}

/// Family, order and exponent of a norm. `p = f64::INFINITY` is the
/// supremum norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub family: NormFamily,
    pub alpha: FracOrder,
    pub p: f64,
}

impl NormSpec {
    pub fn new(family: NormFamily, alpha: f64, p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self {
            family,
            alpha: FracOrder::new(alpha)?,
            p,
        })
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("exponent p = {p} is below 1")))
    }
}
