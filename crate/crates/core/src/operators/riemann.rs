use super::difference::integer_derivative;
use super::integral::frac_integral;
use super::singular::{snap, split_left};
use super::{by_side, check_order};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, l1_weights, rgamma, SampledFunction, Side, Singular};
use crate::par::map_range;

/// L1 scheme: exact RL derivative of the interpolant, plus the closed-form
/// derivative of a split-off endpoint power.
fn left_rl(u: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    let g = *u.grid();
    let n = g.n();
    let h = g.h();
    let split = split_left(u, Some(alpha - 1.0))?;
    let r = &split.rest;
    let b = l1_weights(alpha, n);
    let k_diff = h.powf(-alpha) * rgamma(2.0 - alpha);
    let k_start = rgamma(1.0 - alpha);
    let lead = match split.lead {
        Some(l) => {
            let e = l.exponent - alpha;
            let z = snap(l.exponent + 1.0 - alpha, 0.0);
            Some((l.coeff * gamma_fn(l.exponent + 1.0)? * rgamma(z), e))
        }
        None => None,
    };
    let last = if split.far_flagged { n - 1 } else { n };
    let values = map_range(g.len(), |j| {
        if j == 0 || j > last {
            return f64::INFINITY;
        }
        let x = j as f64 * h;
        let mut s = 0.0;
        for k in 0..j {
            s += (r[k + 1] - r[k]) * b[j - 1 - k];
        }
        let mut v = r[0] * x.powf(-alpha) * k_start + k_diff * s;
        if let Some((c, e)) = lead {
            if c != 0.0 {
                v += c * x.powf(e);
            }
        }
        v
    });
    SampledFunction::with_singular(
        g,
        values,
        Singular {
            left: true,
            right: split.far_flagged,
        },
    )
}

/// Riemann-Liouville derivative at the nodes.
///
/// For `0 < α < 1` the L1 scheme is used: it is the exact derivative of the
/// piecewise-linear interpolant. Orders `α = m + σ` compose the σ-order
/// derivative with `m` nodal differences. The base node is always flagged.
pub fn rl_derivative(u: &SampledFunction, alpha: f64, side: Side) -> Result<SampledFunction> {
    check_order(alpha, 0.0, f64::INFINITY, false)?;
    let m = alpha.floor();
    let sigma = alpha - m;
    let frac = if sigma > 0.0 {
        by_side(u, side, |v| left_rl(v, sigma))?
    } else {
        u.clone()
    };
    if m == 0.0 {
        return Ok(frac);
    }
    let d = integer_derivative(&frac, m as u32)?;
    Ok(match side {
        Side::Left => d,
        Side::Right if m as u32 % 2 == 1 => d.scale(-1.0),
        Side::Right => d,
    })
}

/// Caputo derivative `I^{1-α} 𝒟u` with `𝒟u` the nodal difference derivative.
pub fn caputo_derivative(u: &SampledFunction, alpha: f64, side: Side) -> Result<SampledFunction> {
    check_order(alpha, 0.0, f64::INFINITY, false)?;
    if u.singular().any() {
        return Err(Error::unsupported(
            "Caputo derivative needs a function differentiable up to the endpoints",
        ));
    }
    let m = alpha.floor();
    let sigma = alpha - m;
    if sigma == 0.0 {
        return rl_derivative(u, alpha, side);
    }
    by_side(u, side, |v| {
        let d = integer_derivative(v, m as u32 + 1)?;
        frac_integral(&d, 1.0 - sigma, Side::Left)
    })
}
