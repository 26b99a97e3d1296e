use super::check_exponent;
use crate::error::{Error, Result};
use crate::numerics::{discrete_fourier, LineFunction};
use crate::operators::line::aliasing_warning;
use crate::operators::Checked;

/// `∫ w(ξ) |û(ξ)|^p dξ` on the discrete frequency grid.
fn weighted(u: &LineFunction, p: f64, w: impl Fn(f64) -> f64) -> Result<Checked<f64>> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::unsupported("spectral integrals need finite p"));
    }
    let v = u.values();
    let spec = discrete_fourier(&v[..v.len() - 1], u.half_width());
    let sum: f64 = spec
        .coeffs
        .iter()
        .zip(&spec.freqs)
        .map(|(c, &xi)| w(xi) * c.norm().powf(p))
        .sum();
    let mut warnings = Vec::new();
    if let Some(msg) = aliasing_warning(&spec.coeffs, &spec.freqs) {
        warnings.push(msg);
    }
    Ok(Checked {
        value: sum * spec.dxi(),
        warnings,
    })
}

/// `∫ (1 + |ξ|^{sp}) |û(ξ)|^p dξ` with `û(ξ) = ∫ u e^{-iξx} dx`.
pub fn fourier_seminorm(u: &LineFunction, s: f64, p: f64) -> Result<Checked<f64>> {
    if s < 0.0 {
        return Err(Error::domain(format!("s = {s} is negative")));
    }
    weighted(u, p, |xi| 1.0 + xi.abs().powf(s * p))
}

/// `∫ |ξ|^{2α} |û(ξ)|^2 dξ`.
pub fn spectral_moment(u: &LineFunction, alpha: f64) -> Result<Checked<f64>> {
    if alpha < 0.0 {
        return Err(Error::domain(format!("alpha = {alpha} is negative")));
    }
    weighted(u, 2.0, |xi| if alpha == 0.0 { 1.0 } else { xi.abs().powf(2.0 * alpha) })
}
