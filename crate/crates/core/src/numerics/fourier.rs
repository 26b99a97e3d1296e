use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::function::Side;

/// Samples of `û(ξ) = ∫ u(x) e^{-iξx} dx` on the FFT frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub coeffs: Vec<Complex64>,
    /// Angular frequencies, FFT ordering (non-negative first).
    pub freqs: Vec<f64>,
    /// Sample spacing in `x`.
    pub h: f64,
    /// Position of the first sample.
    pub x0: f64,
    /// Number of samples before zero padding.
    pub len: usize,
}

impl Spectrum {
    /// Frequency spacing.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / (self.coeffs.len() as f64 * self.h)
    }

    /// Index of the Nyquist mode.
    pub fn nyquist(&self) -> usize {
        self.coeffs.len() / 2
    }
}

/// Transform of samples `u(-L + j h)`, `h = 2L / values.len()`.
///
/// The input is zero-padded on the right to a power of two. Coefficients
/// approximate the continuous transform of the zero extension:
/// `û(ξ_k) ≈ h e^{iξ_k L} FFT(u)_k`.
pub fn discrete_fourier(values: &[f64], half_width: f64) -> Spectrum {
    let len = values.len();
    let h = 2.0 * half_width / len as f64;
    let n = len.next_power_of_two();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let x0 = -half_width;
    let freqs = frequencies(n, h);
    for (c, xi) in buf.iter_mut().zip(&freqs) {
        *c *= Complex64::from_polar(h, -xi * x0);
    }
    Spectrum {
        coeffs: buf,
        freqs,
        h,
        x0,
        len,
    }
}

/// Inverse of [`discrete_fourier`], returning all padded samples.
pub fn inverse_fourier(spec: &Spectrum) -> Vec<Complex64> {
    let n = spec.coeffs.len();
    let mut buf: Vec<Complex64> = spec
        .coeffs
        .iter()
        .zip(&spec.freqs)
        .map(|(c, xi)| c * Complex64::from_polar(1.0, xi * spec.x0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let k = 1.0 / (n as f64 * spec.h);
    buf.iter().map(|c| c * k).collect()
}

/// `(iξ)^α` (left) or `(-iξ)^α` (right) on the principal branch,
/// `|ξ|^α e^{±iαπ sgn(ξ)/2}`.
pub fn fractional_multiplier(xi: f64, alpha: f64, side: Side) -> Complex64 {
    if alpha == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if xi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    Complex64::from_polar(xi.abs().powf(alpha), s * alpha * PI / 2.0 * xi.signum())
}

pub(crate) fn frequencies(n: usize, h: f64) -> Vec<f64> {
    let dxi = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|k| {
            if k < n / 2 {
                k as f64 * dxi
            } else {
                (k as f64 - n as f64) * dxi
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(n: usize, l: f64) -> Vec<f64> {
        let h = 2.0 * l / n as f64;
        (0..n).map(|j| (-(-l + j as f64 * h).powi(2) / 2.0).exp()).collect()
    }

    #[test]
    fn multiplier_integer_order() {
        let m = fractional_multiplier(2.0, 1.0, Side::Left);
        assert!((m - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let m = fractional_multiplier(-2.0, 1.0, Side::Right);
        assert!((m - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(fractional_multiplier(0.0, 0.5, Side::Left).norm(), 0.0);
    }

    #[test]
    fn impulse_has_flat_magnitude() {
        let mut v = vec![0.0; 64];
        v[32] = 1.0;
        let s = discrete_fourier(&v, 1.0);
        let m0 = s.coeffs[0].norm();
        assert!(s.coeffs.iter().all(|c| (c.norm() - m0).abs() < 1e-14));
    }

    #[test]
    fn gaussian_transform() {
        let s = discrete_fourier(&gaussian(1024, 16.0), 16.0);
        let r = (2.0 * PI).sqrt();
        for (c, xi) in s.coeffs.iter().zip(&s.freqs) {
            let exact = r * (-xi * xi / 2.0).exp();
            if exact > 1e-3 {
                assert!(((c.re - exact) / exact).abs() < 1e-6, "xi = {xi}");
                assert!(c.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let v: Vec<f64> = (0..256).map(|j| ((j * j) % 17) as f64 - 8.0).collect();
        let s = discrete_fourier(&v, 3.0);
        let back = inverse_fourier(&s);
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b.re).abs() <= 1e-12 * scale);
        }
        let lhs: f64 = s.h * v.iter().map(|x| x * x).sum::<f64>();
        let rhs: f64 = s.dxi() / (2.0 * PI) * s.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!(((lhs - rhs) / lhs).abs() < 1e-12);
    }

    #[test]
    fn pads_to_power_of_two() {
        let s = discrete_fourier(&[1.0; 100], 1.0);
        assert_eq!(s.coeffs.len(), 128);
        assert_eq!(s.len, 100);
        let back = inverse_fourier(&s);
        assert!(back[..100].iter().all(|c| (c.re - 1.0).abs() < 1e-12));
        assert!(back[100..].iter().all(|c| c.norm() < 1e-12));
    }
}
