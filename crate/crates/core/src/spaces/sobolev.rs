use serde::{Deserialize, Serialize};

use super::gagliardo::gagliardo_seminorm;
use super::fourier::fourier_seminorm;
use super::lp::lp_norm_detailed;
use super::{NormFamily, NormSpec, Operand};
use crate::error::{Error, Result};
use crate::numerics::quad::Integral;
use crate::numerics::{LineFunction, SampledFunction, Side};
use crate::operators::{integer_derivative, rl_derivative, spectral_derivative};

/// A norm value with its parts and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    /// The norm; `+inf` when it diverges.
    pub value: f64,
    /// `‖u‖_{W^{m,p}}` (absent for the zero-trace families).
    pub function_part: f64,
    /// Norm of the fractional part: `‖D^α u‖_p`, a seminorm, or a spectral
    /// integral, depending on the family.
    pub derivative_part: f64,
    pub divergent: bool,
    /// For divergent norms: `(n, value)` with the singular end cells left
    /// out, at the input resolution and two refinements.
    pub refinement: Vec<(usize, f64)>,
    pub warnings: Vec<String>,
}

pub(crate) fn combine(a: f64, b: f64, p: f64) -> f64 {
    if p.is_infinite() {
        a + b
    } else {
        (a.powf(p) + b.powf(p)).powf(1.0 / p)
    }
}

/// `‖u‖_{W^{m,p}}`, combining the integer derivatives up to `m`.
fn integer_part(u: &SampledFunction, m: u32, p: f64) -> Result<f64> {
    let mut acc = lp_norm_detailed(u, p)?.value;
    for k in 1..=m {
        let d = integer_derivative(u, k)?;
        acc = combine(acc, lp_norm_detailed(&d, p)?.value, p);
    }
    Ok(acc)
}

/// `‖D^α u‖_p` on an interval (product RL realization).
fn one_sided_interval(u: &SampledFunction, alpha: f64, p: f64, side: Side) -> Result<Integral> {
    let d = rl_derivative(u, alpha, side)?;
    lp_norm_detailed(&d, p)
}

/// Finite-domain value of a family, split into function and derivative
/// parts, plus the part with singular end cells dropped.
struct Parts {
    function_part: f64,
    derivative: Integral,
}

impl Parts {
    fn total(&self, family: NormFamily, p: f64, truncated: bool) -> f64 {
        let d = if truncated {
            self.derivative.truncated
        } else {
            self.derivative.value
        };
        match family {
            NormFamily::ZeroTraceLeft | NormFamily::ZeroTraceRight => d,
            _ => combine(self.function_part, d, p),
        }
    }
}

fn interval_parts(u: &SampledFunction, spec: &NormSpec) -> Result<Parts> {
    let (alpha, p) = (spec.alpha.alpha(), spec.p);
    let m = spec.alpha.m();
    let function_part = match spec.family {
        NormFamily::ZeroTraceLeft | NormFamily::ZeroTraceRight => 0.0,
        _ => integer_part(u, m, p)?,
    };
    let derivative = match spec.family {
        NormFamily::OneSidedLeft | NormFamily::ZeroTraceLeft => one_sided_interval(u, alpha, p, Side::Left)?,
        NormFamily::OneSidedRight | NormFamily::ZeroTraceRight => {
            one_sided_interval(u, alpha, p, Side::Right)?
        }
        NormFamily::Symmetric => {
            // both one-sided norms, each carrying its own copy of ‖u‖_{W^{m,p}}
            let l = one_sided_interval(u, alpha, p, Side::Left)?;
            let r = one_sided_interval(u, alpha, p, Side::Right)?;
            let sym = |fl: f64, fr: f64| {
                let nl = combine(function_part, fl, p);
                let nr = combine(function_part, fr, p);
                combine(nl, nr, p)
            };
            // stored so that combine(function_part, derivative) reproduces the
            // symmetric norm; see `symmetric_derivative`
            return Ok(Parts {
                function_part,
                derivative: Integral {
                    value: symmetric_derivative(sym(l.value, r.value), function_part, p),
                    truncated: symmetric_derivative(sym(l.truncated, r.truncated), function_part, p),
                    divergent: l.divergent || r.divergent,
                },
            });
        }
        NormFamily::Gagliardo => {
            if m > 0 {
                return Err(Error::unsupported("the Gagliardo seminorm needs 0 < alpha < 1"));
            }
            let s = gagliardo_seminorm(Operand::Interval(u), alpha, p)?;
            Integral {
                value: s.value,
                truncated: s.value,
                divergent: s.divergent,
            }
        }
        NormFamily::Fourier => {
            return Err(Error::unsupported("the Fourier norm is defined on the line only"));
        }
    };
    Ok(Parts {
        function_part,
        derivative,
    })
}

/// The `d` with `combine(f, d, p) = total`.
fn symmetric_derivative(total: f64, f: f64, p: f64) -> f64 {
    if total.is_infinite() {
        f64::INFINITY
    } else if p.is_infinite() {
        total - f
    } else {
        (total.powf(p) - f.powf(p)).max(0.0).powf(1.0 / p)
    }
}

fn interval_norm(u: &SampledFunction, spec: &NormSpec) -> Result<NormValue> {
    let parts = interval_parts(u, spec)?;
    let value = parts.total(spec.family, spec.p, false);
    let divergent = parts.derivative.divergent || value.is_infinite();
    let mut refinement = Vec::new();
    if divergent {
        refinement.push((u.grid().n(), parts.total(spec.family, spec.p, true)));
        for factor in [2, 4] {
            let fine = u.refine(factor)?;
            let pf = interval_parts(&fine, spec)?;
            refinement.push((fine.grid().n(), pf.total(spec.family, spec.p, true)));
        }
    }
    Ok(NormValue {
        value: if divergent { f64::INFINITY } else { value },
        function_part: parts.function_part,
        derivative_part: parts.derivative.value,
        divergent,
        refinement,
        warnings: Vec::new(),
    })
}

fn line_norm(u: &LineFunction, spec: &NormSpec) -> Result<NormValue> {
    let (alpha, p) = (spec.alpha.alpha(), spec.p);
    let sampled = u.as_sampled();
    let mut warnings = Vec::new();
    if !u.decay_checked() {
        warnings.push("samples do not decay at the ends of the window".to_string());
    }
    let function_part = match spec.family {
        NormFamily::ZeroTraceLeft | NormFamily::ZeroTraceRight => 0.0,
        _ => integer_part(&sampled, spec.alpha.m(), p)?,
    };
    let mut one_sided = |side: Side| -> Result<f64> {
        let d = spectral_derivative(u, alpha, side)?;
        warnings.extend(d.warnings);
        Ok(lp_norm_detailed(&d.value.as_sampled(), p)?.value)
    };
    let (value, derivative_part) = match spec.family {
        NormFamily::OneSidedLeft | NormFamily::OneSidedRight => {
            let side = if spec.family == NormFamily::OneSidedLeft {
                Side::Left
            } else {
                Side::Right
            };
            let d = one_sided(side)?;
            (combine(function_part, d, p), d)
        }
        NormFamily::ZeroTraceLeft | NormFamily::ZeroTraceRight => {
            let side = if spec.family == NormFamily::ZeroTraceLeft {
                Side::Left
            } else {
                Side::Right
            };
            let d = one_sided(side)?;
            (d, d)
        }
        NormFamily::Symmetric => {
            let l = combine(function_part, one_sided(Side::Left)?, p);
            let r = combine(function_part, one_sided(Side::Right)?, p);
            let total = combine(l, r, p);
            (total, symmetric_derivative(total, function_part, p))
        }
        NormFamily::Gagliardo => {
            if spec.alpha.m() > 0 {
                return Err(Error::unsupported("the Gagliardo seminorm needs 0 < alpha < 1"));
            }
            let s = gagliardo_seminorm(Operand::Line(u), alpha, p)?;
            (combine(function_part, s.value, p), s.value)
        }
        NormFamily::Fourier => {
            if p.is_infinite() {
                return Err(Error::unsupported("the Fourier norm needs finite p"));
            }
            let s = fourier_seminorm(u, alpha, p)?;
            warnings.extend(s.warnings);
            let v = s.value.powf(1.0 / p);
            (v, v)
        }
    };
    let divergent = value.is_infinite();
    Ok(NormValue {
        value,
        function_part,
        derivative_part,
        divergent,
        refinement: Vec::new(),
        warnings,
    })
}

/// The norm selected by `spec`.
///
/// Fractional derivatives are taken with the product RL scheme on intervals
/// and spectrally on the line. The symmetric norm is
/// `(‖u‖^p_{left} + ‖u‖^p_{right})^{1/p}` with both one-sided norms in full,
/// so `‖u‖_{W^{m,p}}` enters twice. The Gagliardo family is
/// `(‖u‖^p_p + [u]^p)^{1/p}`; the Fourier family is the `p`-th root of the
/// weighted spectral integral.
pub fn sobolev_norm<'a>(u: impl Into<Operand<'a>>, spec: &NormSpec) -> Result<NormValue> {
    match u.into() {
        Operand::Interval(u) => interval_norm(u, spec),
        Operand::Line(u) => line_norm(u, spec),
    }
}
