use serde::{Deserialize, Serialize};

use super::lp::lp_norm;
use crate::error::{Error, Result};
use crate::numerics::{SampledFunction, Side};
use crate::operators::endpoint_constant;
use crate::par;

/// Relative growth of the Hölder quotient under one refinement that still
/// counts as stable.
const HOLDER_DRIFT: f64 = 0.05;

/// A boundary value with the Hölder quotient that certifies it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: f64,
    pub side: Side,
    /// Interior end of the subinterval on which the quotient was measured:
    /// `[c, b]` for the left trace, `[a, c]` for the right one.
    pub subinterval_start: f64,
    pub holder_quotient: f64,
}

/// `max_{i<j} |v_j - v_i| / (x_j - x_i)^e`.
pub(crate) fn holder_sup(x: &[f64], v: &[f64], exponent: f64) -> f64 {
    let rows = par::map_range(x.len(), |i| {
        let mut best = 0.0f64;
        for j in i + 1..x.len() {
            let q = (v[j] - v[i]).abs() / (x[j] - x[i]).powf(exponent);
            best = best.max(q);
        }
        best
    });
    rows.into_iter().fold(0.0, f64::max)
}

/// Hölder quotient of exponent `exponent` over the nodes in `[c, d]`.
pub fn holder_quotient(u: &SampledFunction, exponent: f64, subinterval: (f64, f64)) -> Result<f64> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(Error::domain(format!("Hölder exponent {exponent} must lie in (0, 1]")));
    }
    let (c, d) = subinterval;
    let g = u.grid();
    let tol = 1e-12 * g.width();
    if !(c < d && c >= g.a() - tol && d <= g.b() + tol) {
        return Err(Error::domain(format!("[{c}, {d}] is not inside [{}, {}]", g.a(), g.b())));
    }
    let idx: Vec<usize> = g.indices_in(c, d).filter(|&j| !u.is_flagged(j)).collect();
    let x: Vec<f64> = idx.iter().map(|&j| g.node(j)).collect();
    let v: Vec<f64> = idx.iter().map(|&j| u.value(j)).collect();
    Ok(holder_sup(&x, &v, exponent))
}

/// `p/(1 - αp)`, defined for `αp < 1`.
pub fn sobolev_conjugate(p: f64, alpha: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite() && alpha > 0.0) {
        return Err(Error::domain(format!("need finite p >= 1 and alpha > 0, got p = {p}, alpha = {alpha}")));
    }
    if alpha * p >= 1.0 {
        return Err(Error::Hypothesis(format!("alpha*p = {} is not below 1", alpha * p)));
    }
    Ok(p / (1.0 - alpha * p))
}

/// Boundary value at the far end of `side` (`u(b)` for the left trace,
/// `u(a)` for the right one), defined when `αp > 1`.
///
/// The value is the nodal one; it is accepted once the Hölder quotient of
/// exponent `α - 1/p` on the quarter-to-end subinterval is stable between
/// the samples and every second sample.
pub fn trace(u: &SampledFunction, alpha: f64, p: f64, side: Side) -> Result<TraceValue> {
    if !(alpha > 0.0 && p >= 1.0) {
        return Err(Error::domain(format!("need alpha > 0 and p >= 1, got {alpha}, {p}")));
    }
    if alpha * p <= 1.0 {
        return Err(Error::Hypothesis(format!(
            "the trace needs alpha*p > 1, got {}",
            alpha * p
        )));
    }
    let g = u.grid();
    let (c, sub, j) = match side {
        Side::Left => {
            let c = g.a() + 0.25 * g.width();
            (c, (c, g.b()), g.n())
        }
        Side::Right => {
            let c = g.b() - 0.25 * g.width();
            (c, (g.a(), c), 0)
        }
    };
    if u.is_flagged(j) {
        return Err(Error::domain("the samples are unbounded at the trace point"));
    }
    let exponent = (alpha - 1.0 / p).min(1.0);
    let fine = holder_quotient(u, exponent, sub)?;
    if g.n().is_multiple_of(2) && g.n() >= 8 {
        let coarse = holder_quotient(&u.coarsen(2)?, exponent, sub)?;
        if fine > (1.0 + HOLDER_DRIFT) * coarse + 1e-12 * u.max_abs() {
            return Err(Error::Unstable { coarse, fine });
        }
    }
    Ok(TraceValue {
        value: u.value(j),
        side,
        subinterval_start: c,
        holder_quotient: fine,
    })
}

/// Whether the endpoint constant of `u` vanishes relative to `‖u‖_1`.
pub fn is_regular(u: &SampledFunction, alpha: f64, side: Side, tol: f64) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let c = endpoint_constant(u, alpha, side)?;
    let norm = lp_norm(u, 1.0, false)?;
    Ok(c.c_value.abs() <= tol * norm)
}
