//! Quadrature on sampled data and on closed-form integrands.

use gauss_quad::GaussLegendre;

use super::function::{SampledFunction, Singular};

/// Cells next to a flagged end integrated with the geometric interpolant
/// when no power-law fit is available.
const FALLBACK_BAND: usize = 32;
/// Samples next to a flagged end below this fraction of the band maximum
/// are treated as rounding noise.
const NOISE_FLOOR: f64 = 1e-10;

/// Integral of sampled data, split into its regular part and the end cells
/// touching flagged nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    /// Full integral; `±inf` when an end cell is not integrable.
    pub value: f64,
    /// Integral with the end cells next to flagged nodes left out.
    pub truncated: f64,
    pub divergent: bool,
}

/// Local power-law exponent between two samples at distances `d0 < d1`.
fn local_exponent(v0: f64, v1: f64, d0: f64, d1: f64) -> Option<f64> {
    if v0 != 0.0 && v1 != 0.0 && v0.signum() == v1.signum() {
        Some((v1 / v0).ln() / (d1 / d0).ln())
    } else {
        None
    }
}

/// `∫_{d0}^{d1}` of the power law through `(d0, v0)` and `(d1, v1)`.
fn power_cell(v0: f64, v1: f64, d0: f64, d1: f64) -> f64 {
    match local_exponent(v0, v1, d0, d1) {
        Some(g) if (g + 1.0).abs() > 1e-10 => v0 * d0 / (g + 1.0) * ((d1 / d0).powf(g + 1.0) - 1.0),
        Some(_) => v0 * d0 * (d1 / d0).ln(),
        None => 0.5 * (d1 - d0) * (v0 + v1),
    }
}

/// `∫_0^h` given the samples at distances `h` and `2h` from a singular end.
fn end_cell(v1: f64, v2: f64, h: f64) -> (f64, bool) {
    match local_exponent(v1, v2, 1.0, 2.0) {
        // borderline exponents within rounding of -1 count as divergent
        Some(g) if g <= -1.0 + 1e-9 => (v1.signum() * f64::INFINITY, true),
        Some(g) => (v1 * h / (g + 1.0), false),
        None => (h * (1.5 * v1 - 0.5 * v2), false),
    }
}

/// Exponent `g` of the model `x^g (A + B x)` through the samples at
/// distances `h`, `2h`, `3h` from a singular end.
///
/// Newton on `v1 - 2^{1-g} v2 + 3^{-g} v3 = 0`, started from the two-point
/// exponent extrapolated linearly to the end.
fn fit_exponent(v1: f64, v2: f64, v3: f64) -> Option<f64> {
    let g12 = local_exponent(v1, v2, 1.0, 2.0)?;
    let g23 = local_exponent(v2, v3, 2.0, 3.0)?;
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    // g(x) - g(0) is linear in x; the two-point exponents sit at h/ln 2 and h/ln 1.5
    let (s12, s23) = (1.0 / l2, 1.0 / (l3 - l2));
    let mut g = g12 - (g23 - g12) * s12 / (s23 - s12);
    for _ in 0..50 {
        let phi = v1 - (l2 * (1.0 - g)).exp() * v2 + (-l3 * g).exp() * v3;
        let dphi = l2 * (l2 * (1.0 - g)).exp() * v2 - l3 * (-l3 * g).exp() * v3;
        if dphi == 0.0 || !dphi.is_finite() {
            return None;
        }
        let step = phi / dphi;
        g -= step;
        if step.abs() <= 1e-14 * (1.0 + g.abs()) {
            break;
        }
    }
    // a fit far from the local exponent is not describing a power law
    ((g - g12).abs() < 0.5).then_some(g)
}

/// Integral over the first `band` cells from a singular end, with `v[k]`
/// the sample at distance `k h` (`v[0]` unused).
///
/// Returns `(end cell, remaining band cells, divergent)`. Samples are
/// divided by `x^g` and the quotient is interpolated linearly, so
/// `x^g (A + B x)` is integrated exactly.
fn singular_band(v: &[f64], h: f64, band: usize) -> (f64, f64, bool) {
    let scale = v[1..=band].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let near = v[1..=band.min(3)].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if near <= NOISE_FLOOR * scale {
        // rounding noise next to the end, not a power law
        let rest: f64 = (1..band).map(|i| 0.5 * h * (v[i] + v[i + 1])).sum();
        return (0.5 * h * v[1], rest, false);
    }
    let fitted = if band >= 3 { fit_exponent(v[1], v[2], v[3]) } else { None };
    let Some(g) = fitted else {
        // no clean power law: geometric cells near the end, trapezoids beyond
        let (end, d) = end_cell(v[1], v[2.min(v.len() - 1)], h);
        let mut rest = 0.0;
        for i in 1..band {
            rest += if i < FALLBACK_BAND {
                power_cell(v[i], v[i + 1], i as f64 * h, (i + 1) as f64 * h)
            } else {
                0.5 * h * (v[i] + v[i + 1])
            };
        }
        return (end, rest, d);
    };
    if g <= -1.0 + 1e-9 {
        let mut rest = 0.0;
        for i in 1..band {
            rest += power_cell(v[i], v[i + 1], i as f64 * h, (i + 1) as f64 * h);
        }
        return (v[1].signum() * f64::INFINITY, rest, true);
    }
    let r = |k: usize| v[k] / (k as f64 * h).powf(g);
    let r0 = 2.0 * r(1) - r(2);
    let cell = |i: usize, ri: f64, rj: f64| {
        let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
        let m0 = (x1.powf(g + 1.0) - x0.powf(g + 1.0)) / (g + 1.0);
        let m1 = (x1.powf(g + 2.0) - x0.powf(g + 2.0)) / (g + 2.0) - x0 * m0;
        ri * m0 + (rj - ri) * m1 / h
    };
    let end = cell(0, r0, r(1));
    let mut rest = 0.0;
    for i in 1..band {
        rest += cell(i, r(i), r(i + 1));
    }
    (end, rest, false)
}

/// Integral of the interpolant of `values` (spacing `h`).
///
/// Next to a flagged endpoint the data are treated as `x^g` times a
/// piecewise-linear function, `g` fitted from the three nearest samples.
pub fn integrate_values(values: &[f64], h: f64, singular: Singular) -> Integral {
    let n = values.len() - 1;
    if singular.left && singular.right && n <= 2 {
        // nothing to fit between two singular ends
        return Integral {
            value: f64::INFINITY,
            truncated: 0.0,
            divergent: true,
        };
    }
    // each flagged end owns half the grid
    let band = n / 2;
    let mut body = 0.0;
    let mut ends = 0.0;
    let mut divergent = false;
    let mut lo = 0;
    let mut hi = n;
    if singular.left {
        let (e, rest, d) = singular_band(&values[..=band], h, band);
        ends += e;
        body += rest;
        divergent |= d;
        lo = band;
    }
    if singular.right {
        let mirrored: Vec<f64> = values[n - band..].iter().rev().copied().collect();
        let (e, rest, d) = singular_band(&mirrored, h, band);
        ends += e;
        body += rest;
        divergent |= d;
        hi = n - band;
    }
    for i in lo..hi {
        body += 0.5 * h * (values[i] + values[i + 1]);
    }
    Integral {
        value: if divergent { ends } else { body + ends },
        truncated: body,
        divergent,
    }
}

/// Integral of a sampled function over its grid.
pub fn integrate(u: &SampledFunction) -> Integral {
    integrate_values(u.values(), u.grid().h(), u.singular())
}

/// Plain composite trapezoid rule.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Nodes and weights of composite Simpson in `s = ln t` on `[t0, t1]`:
/// `Σ w_k g(t_k) ≈ ∫_{t0}^{t1} g(t) dt`.
pub fn log_simpson(t0: f64, t1: f64, per_unit: usize) -> (Vec<f64>, Vec<f64>) {
    let span = (t1 / t0).ln();
    let mut m = ((span * per_unit as f64).ceil() as usize).max(2);
    if m % 2 == 1 {
        m += 1;
    }
    let ds = span / m as f64;
    let s0 = t0.ln();
    let mut ts = Vec::with_capacity(m + 1);
    let mut ws = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let t = if k == m { t1 } else { (s0 + k as f64 * ds).exp() };
        let c = if k == 0 || k == m {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        ts.push(t);
        ws.push(c * ds / 3.0 * t);
    }
    (ts, ws)
}

/// Composite Gauss-Legendre on `panels` equal panels of `[a, b]`.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, degree: usize) -> f64 {
    let rule = GaussLegendre::new(degree).expect("Gauss-Legendre degree must be at least 2");
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * w;
            rule.integrate(lo, lo + w, &f)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn trapezoid_exact_on_linears() {
        let g = uniform_grid(0.0, 1.0, 10).unwrap();
        let u = SampledFunction::from_fn(g, |x| 2.0 * x + 1.0).unwrap();
        assert!((integrate(&u).value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let g = uniform_grid(0.0, 1.0, 256).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap();
        let r = integrate(&u);
        assert!(!r.divergent);
        assert!((r.value - 2.0).abs() < 1e-4, "{}", r.value);
        let r = integrate(&u.reflect());
        assert!((r.value - 2.0).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn non_integrable_endpoint() {
        let g = uniform_grid(0.0, 1.0, 64).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-1.2)).unwrap();
        let r = integrate(&u);
        assert!(r.divergent && r.value.is_infinite() && r.truncated.is_finite());
    }

    #[test]
    fn log_simpson_power() {
        // ∫_{0.01}^{2} t^{-1.5} dt = 2 (0.01^{-1/2} - 2^{-1/2})
        let (t, w) = log_simpson(0.01, 2.0, 32);
        let s: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powf(-1.5)).sum();
        let exact = 2.0 * (10.0 - 2f64.powf(-0.5));
        assert!(((s - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn gauss_legendre_polynomial() {
        let v = gauss_legendre(|x| x.powi(5) - x, 0.0, 2.0, 3, 4);
        assert!((v - (64.0 / 6.0 - 2.0)).abs() < 1e-12);
    }
}
