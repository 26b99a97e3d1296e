use crate::error::{Error, Result};

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// The Gamma function. Rejects the poles `0, -1, -2, ...`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma(x))
}

/// `1 / Γ(x)`, extended by zero at the poles.
///
/// The zero at the poles is what makes `D^α κ^α = 0` come out exactly.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Γ(x) for arguments known not to be poles.
///
/// Positive integers are returned as exact factorials.
pub(crate) fn gamma(x: f64) -> f64 {
    if (1.0..=171.0).contains(&x) && x == x.round() {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    statrs::function::gamma::gamma(x)
}
