use rustfft::num_complex::Complex64;

use super::{check_order, Checked};
use crate::error::Result;
use crate::numerics::quad::log_simpson;
use crate::numerics::{
    discrete_fourier, fractional_multiplier, gamma_fn, inverse_fourier, LineFunction, Side,
};
use crate::par::map_range;

/// Log-spaced offsets per unit of `ln t`.
const OFFSETS_PER_UNIT: usize = 48;

fn decay_warning(u: &LineFunction) -> Option<String> {
    (!u.decay_checked()).then(|| {
        "samples do not decay to 1e-8 of the peak at ±L; truncation error likely".to_string()
    })
}

fn left_marchaud(u: &LineFunction, alpha: f64) -> (Vec<f64>, f64) {
    let g = u.grid();
    let h = g.h();
    let n = g.n();
    let v = u.values();
    let lo = g.a();
    let interp = |x: f64| -> f64 {
        if x < lo {
            return 0.0;
        }
        let (j, t) = g.locate(x);
        (1.0 - t) * v[j] + t * v[j + 1]
    };
    let k = alpha / gamma_fn(1.0 - alpha).expect("0 < alpha < 1");
    let t0 = 0.5 * h;
    let out = map_range(n + 1, |j| {
        let x = g.node(j);
        let ux = v[j];
        // distance to the left truncation point; beyond it u = 0
        let reach = x - lo;
        let slope = if j > 0 { (v[j] - v[j - 1]) / h } else { v[0] / h };
        let mut s = slope * t0.powf(1.0 - alpha) / (1.0 - alpha);
        if reach > t0 {
            let (ts, ws) = log_simpson(t0, reach, OFFSETS_PER_UNIT);
            for (t, w) in ts.iter().zip(&ws) {
                s += w * (ux - interp(x - t)) * t.powf(-1.0 - alpha);
            }
            s += ux * reach.powf(-alpha) / alpha;
        } else {
            s += ux * t0.powf(-alpha) / alpha;
        }
        k * s
    });
    // contribution a slowly decaying tail beyond -L could have added
    let edge = v[0].abs().max(v[n].abs());
    let tail = edge * (h).powf(-alpha) * k / alpha;
    (out, tail)
}

/// Marchaud derivative
/// `α/Γ(1-α) ∫_0^∞ (u(x) - u(x ∓ t)) t^{-1-α} dt` of the interpolant,
/// with `u = 0` outside `[-L, L]`.
///
/// Offsets below `h/2` are integrated exactly against the local slope;
/// beyond the truncation point the integrand is `u(x) t^{-1-α}`.
pub fn marchaud_derivative(u: &LineFunction, alpha: f64, side: Side) -> Result<Checked<LineFunction>> {
    check_order(alpha, 0.0, 1.0, false)?;
    let src = match side {
        Side::Left => u.clone(),
        Side::Right => u.reflect(),
    };
    let (values, tail) = left_marchaud(&src, alpha);
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = LineFunction::new(src.half_width(), values)?;
    if side == Side::Right {
        out = out.reflect();
    }
    let mut warnings: Vec<String> = decay_warning(u).into_iter().collect();
    if tail > 1e-6 * peak {
        warnings.push(format!(
            "tail contribution estimate {tail:.3e} exceeds 1e-6 of the result"
        ));
    }
    Ok(Checked {
        value: out,
        warnings,
    })
}

/// Fraction of spectral energy in the top quarter of the frequency band.
pub(crate) fn top_quartile_fraction(coeffs: &[Complex64], freqs: &[f64]) -> f64 {
    let xmax = freqs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut top = 0.0;
    let mut all = 0.0;
    for (c, xi) in coeffs.iter().zip(freqs) {
        let e = c.norm_sqr();
        all += e;
        if xi.abs() > 0.75 * xmax {
            top += e;
        }
    }
    if all == 0.0 {
        0.0
    } else {
        top / all
    }
}

pub(crate) fn aliasing_warning(coeffs: &[Complex64], freqs: &[f64]) -> Option<String> {
    let f = top_quartile_fraction(coeffs, freqs);
    (f > 1e-8).then(|| format!("top-quartile spectral energy fraction {f:.3e} exceeds 1e-8"))
}

/// `F^{-1}[(±iξ)^α û]` through the FFT. The Nyquist mode is dropped.
pub fn spectral_derivative(u: &LineFunction, alpha: f64, side: Side) -> Result<Checked<LineFunction>> {
    check_order(alpha, 0.0, f64::INFINITY, false)?;
    let n = u.grid().n();
    let mut spec = discrete_fourier(&u.values()[..n], u.half_width());
    let mut warnings: Vec<String> = decay_warning(u).into_iter().collect();
    warnings.extend(aliasing_warning(&spec.coeffs, &spec.freqs));
    let nyq = spec.nyquist();
    for (k, (c, xi)) in spec.coeffs.iter_mut().zip(&spec.freqs).enumerate() {
        *c = if k == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            *c * fractional_multiplier(*xi, alpha, side)
        };
    }
    let back = inverse_fourier(&spec);
    let re_max = back.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let im_max = back.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if im_max > 1e-8 * re_max {
        warnings.push(format!(
            "imaginary part {im_max:.3e} exceeds 1e-8 of the real part"
        ));
    }
    let padded = back.len();
    let mut values: Vec<f64> = back[..n].iter().map(|c| c.re).collect();
    values.push(back[n % padded].re);
    Ok(Checked {
        value: LineFunction::new(u.half_width(), values)?,
        warnings,
    })
}
