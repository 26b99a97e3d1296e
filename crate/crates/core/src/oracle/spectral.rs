use rustfft::num_complex::Complex64;

use super::form::ClosedForm;
use crate::error::{Error, Result};
use crate::numerics::fourier::frequencies;
use crate::numerics::{fractional_multiplier, inverse_fourier, LineFunction, Side, Spectrum};

/// Resolution of the reference evaluation, `n = 2^16` cells on `[-L, L]`.
pub const REFERENCE_LOG2_N: u32 = 16;

/// The transform is inverted on a periodic box this many times wider than
/// `[-L, L]`. Fractional derivatives decay only like `|x|^{-1-α}`, so the
/// periodic images of a box of width `2L` would bias the result by
/// `O(L^{-1-α})`.
pub const REFERENCE_BOX: usize = 32;

/// `F^{-1}[(±iξ)^α f̂]` on `2^log2_n` cells of `[-L, L]`, using the exact
/// transform of `f` rather than a transform of samples.
pub fn spectral_reference(
    f: &ClosedForm,
    alpha: f64,
    side: Side,
    half_width: f64,
    log2_n: u32,
) -> Result<LineFunction> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::domain("order must be non-negative"));
    }
    f.check_finite()?;
    let cells = 1usize << log2_n;
    let n = cells * REFERENCE_BOX;
    let box_half = half_width * REFERENCE_BOX as f64;
    let h = 2.0 * box_half / n as f64;
    let freqs = frequencies(n, h);
    let mut coeffs = Vec::with_capacity(n);
    for (k, xi) in freqs.iter().enumerate() {
        let fh = f
            .fourier(*xi)
            .ok_or_else(|| Error::unsupported("spectral reference needs a sum of Gaussians"))?;
        coeffs.push(if k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            fh * fractional_multiplier(*xi, alpha, side)
        });
    }
    let spec = Spectrum {
        coeffs,
        freqs,
        h,
        x0: -box_half,
        len: n,
    };
    let all = inverse_fourier(&spec);
    let first = (n - cells) / 2;
    let values: Vec<f64> = all[first..=first + cells].iter().map(|c| c.re).collect();
    LineFunction::new(half_width, values)
}

/// Reference derivative of `exp(-(x - center)^2 / (2 width^2))` at the
/// default resolution.
pub fn gaussian_spectral_reference(
    center: f64,
    width: f64,
    alpha: f64,
    side: Side,
    half_width: f64,
) -> Result<LineFunction> {
    spectral_reference(
        &ClosedForm::gaussian(center, width),
        alpha,
        side,
        half_width,
        REFERENCE_LOG2_N,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_order_is_classical_derivative() {
        let r = gaussian_spectral_reference(0.0, 1.0, 1.0, Side::Left, 16.0).unwrap();
        let g = r.grid();
        let mut worst = 0.0f64;
        for (j, v) in r.values().iter().enumerate() {
            let x = g.node(j);
            worst = worst.max((v + x * (-x * x / 2.0).exp()).abs());
        }
        // peak of |x e^{-x^2/2}| is e^{-1/2}
        assert!(worst / (-0.5f64).exp() < 1e-8, "{worst}");
    }

    #[test]
    fn left_and_right_differ_at_origin() {
        let l = gaussian_spectral_reference(0.0, 1.0, 0.5, Side::Left, 16.0).unwrap();
        let r = gaussian_spectral_reference(0.0, 1.0, 0.5, Side::Right, 16.0).unwrap();
        let mid = l.grid().n() / 2;
        // even input: right derivative is the mirror image of the left one
        assert!((l.values()[mid] - r.values()[mid]).abs() < 1e-12);
        let off = mid + 1000;
        assert!((l.values()[off] - r.values()[2 * mid - off]).abs() < 1e-12);
        assert!((l.values()[off] - r.values()[off]).abs() > 1e-3);
    }

    #[test]
    fn resolution_refinement() {
        let a = spectral_reference(&ClosedForm::gaussian(0.3, 1.2), 0.5, Side::Left, 16.0, 16).unwrap();
        let b = spectral_reference(&ClosedForm::gaussian(0.3, 1.2), 0.5, Side::Left, 16.0, 17).unwrap();
        let peak = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (j, v) in a.values().iter().enumerate() {
            assert!((v - b.values()[2 * j]).abs() <= 1e-9 * peak);
        }
    }
}
