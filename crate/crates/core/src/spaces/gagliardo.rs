use serde::{Deserialize, Serialize};

use super::check_exponent;
use super::trace::holder_sup;
use super::Operand;
use crate::error::{Error, Result};
use crate::numerics::quad::log_simpson;
use crate::numerics::SampledFunction;
use crate::par;

/// Offsets per unit of `ln t`.
const OFFSETS_PER_UNIT: usize = 32;
/// Margin on the roughness exponent below which the seminorm is declared
/// divergent.
const ROUGHNESS_MARGIN: f64 = 0.03;

/// A Gagliardo seminorm with an error bar for the omitted diagonal band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seminorm {
    /// `[u]_{α,p}`; `+inf` when divergent.
    pub value: f64,
    /// Upper bound on the contribution of offsets below `h/2`.
    pub error_bar: f64,
    pub divergent: bool,
    /// Measured exponent `e` in `∫|u(x+t)-u(x)|^p dx ~ t^e` near the diagonal.
    pub roughness: f64,
    /// For divergent seminorms: `(n, value)` computed on coarser samplings.
    pub refinement: Vec<(usize, f64)>,
}

/// Samples and what lies outside them.
struct Profile<'a> {
    v: &'a [f64],
    h: f64,
    /// Zero extension outside the window (line) instead of restriction
    /// (interval).
    extended: bool,
    /// Running integral of `|u|^p` at the nodes (line only).
    mass: Vec<f64>,
}

impl<'a> Profile<'a> {
    fn new(v: &'a [f64], h: f64, p: f64, extended: bool) -> Self {
        let mut mass = Vec::new();
        if extended {
            mass.reserve(v.len());
            let mut acc = 0.0;
            mass.push(0.0);
            for w in v.windows(2) {
                acc += 0.5 * h * (w[0].abs().powf(p) + w[1].abs().powf(p));
                mass.push(acc);
            }
        }
        Self { v, h, extended, mass }
    }

    fn n(&self) -> usize {
        self.v.len() - 1
    }

    fn interp(&self, q: usize, theta: f64) -> f64 {
        if q >= self.n() {
            self.v[self.n()]
        } else {
            (1.0 - theta) * self.v[q] + theta * self.v[q + 1]
        }
    }

    fn mass_at(&self, s: f64) -> f64 {
        let n = self.n();
        let pos = (s / self.h).clamp(0.0, n as f64);
        let q = (pos.floor() as usize).min(n - 1);
        let th = pos - q as f64;
        (1.0 - th) * self.mass[q] + th * self.mass[q + 1]
    }

    /// `∫|u(x+t) - u(x)|^p dx` for the linear interpolant.
    fn difference_mass(&self, t: f64, p: f64) -> f64 {
        let n = self.n();
        let width = n as f64 * self.h;
        let mut total = 0.0;
        if t < width {
            let pos = t / self.h;
            let q = pos.floor() as usize;
            let theta = pos - q as f64;
            // nodes x_j with x_j + t inside the window: j <= last
            let last = n - q - if theta > 0.0 { 1 } else { 0 };
            let diff = |j: usize| (self.interp(j + q, theta) - self.v[j]).abs().powf(p);
            let mut acc = 0.0;
            let mut prev = diff(0);
            for j in 1..=last {
                let cur = diff(j);
                acc += 0.5 * (prev + cur);
                prev = cur;
            }
            acc *= self.h;
            if theta > 0.0 {
                // partial cell from x_last to b - t
                let rest = (1.0 - theta) * self.h;
                let end = (self.v[n] - self.interp(last, 1.0 - theta)).abs().powf(p);
                acc += 0.5 * rest * (prev + end);
            }
            total += acc;
        }
        if self.extended {
            let m = self.mass[n];
            // u(x+t) - u(x) with one of them outside the window
            total += self.mass_at(t.min(width)) + (m - self.mass_at((width - t).max(0.0)));
        }
        total
    }
}

/// `∫_{t0}^{t1} D(t) t^{-1-αp} dt` by log-Simpson over offsets.
fn offset_integral(prof: &Profile, alpha: f64, p: f64, t0: f64, t1: f64) -> f64 {
    let (ts, ws) = log_simpson(t0, t1, OFFSETS_PER_UNIT);
    let d = par::map_slice(&ts, |&t| prof.difference_mass(t, p));
    ts.iter()
        .zip(&ws)
        .zip(&d)
        .map(|((t, w), d)| w * d * t.powf(-1.0 - alpha * p))
        .sum()
}

fn raw(v: &[f64], h: f64, alpha: f64, p: f64, extended: bool) -> (f64, f64, f64) {
    let prof = Profile::new(v, h, p, extended);
    let n = prof.n();
    let width = n as f64 * h;
    let reach = width;
    let mut integral = offset_integral(&prof, alpha, p, 0.5 * h, reach);
    if extended {
        // beyond the window the supports separate: D(t) = 2‖u‖_p^p
        let m = prof.mass[n];
        integral += 2.0 * m * reach.powf(-alpha * p) / (alpha * p);
    }
    let value = 2.0 * integral;

    // t < h/2: D(t) <= Lip^p t^p · width
    let lip = v.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    let omitted = 2.0 * lip.powf(p) * width * (0.5 * h).powf(p * (1.0 - alpha)) / (p * (1.0 - alpha));

    // roughness exponent from two offsets near the diagonal
    let (k1, k2) = if 64 * 4 <= n { (16.0, 64.0) } else { (1.0, 4.0) };
    let d1 = prof.difference_mass(k1 * h, p);
    let d2 = prof.difference_mass(k2 * h, p);
    let roughness = if d1 > 0.0 && d2 > 0.0 {
        (d2 / d1).ln() / (k2 / k1).ln()
    } else {
        p
    };
    (value, omitted, roughness)
}

fn seminorm_of(v: &[f64], h: f64, alpha: f64, p: f64, extended: bool) -> Seminorm {
    let (value_p, omitted, roughness) = raw(v, h, alpha, p, extended);
    let value = value_p.powf(1.0 / p);
    let error_bar = (value_p + omitted).powf(1.0 / p) - value;
    let divergent = roughness <= alpha * p + ROUGHNESS_MARGIN;
    let mut refinement = Vec::new();
    if divergent {
        let n = v.len() - 1;
        for factor in [4usize, 2] {
            if n.is_multiple_of(factor) && n / factor >= 8 {
                let coarse: Vec<f64> = v.iter().step_by(factor).copied().collect();
                let (vp, _, _) = raw(&coarse, h * factor as f64, alpha, p, extended);
                refinement.push((n / factor, vp.powf(1.0 / p)));
            }
        }
        refinement.push((n, value));
    }
    Seminorm {
        value: if divergent { f64::INFINITY } else { value },
        error_bar,
        divergent,
        roughness,
        refinement,
    }
}

fn unflagged(u: &SampledFunction) -> Result<()> {
    if u.singular().any() {
        Err(Error::domain("the Gagliardo seminorm needs bounded samples"))
    } else {
        Ok(())
    }
}

/// `[u]_{W^{α,p}} = (∫∫ |u(x)-u(y)|^p / |x-y|^{1+αp})^{1/p}` for the linear
/// interpolant.
///
/// The double integral is reduced to offsets `t = y - x`, integrated in
/// `ln t` from `h/2` to the domain width (plus the exact tail on the line,
/// where `u` is extended by zero). Offsets below `h/2` are not included in
/// the value; their Lipschitz bound is reported as `error_bar`. When the
/// difference mass near the diagonal decays no faster than `t^{αp}` the
/// seminorm is reported as divergent. `p = inf` gives the Hölder quotient
/// of exponent `α`.
pub fn gagliardo_seminorm<'a>(u: impl Into<Operand<'a>>, alpha: f64, p: f64) -> Result<Seminorm> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    check_exponent(p)?;
    let (v, h, extended) = match u.into() {
        Operand::Interval(u) => {
            unflagged(u)?;
            (u.values().to_vec(), u.grid().h(), false)
        }
        Operand::Line(u) => (u.values().to_vec(), u.grid().h(), true),
    };
    if p.is_infinite() {
        let x: Vec<f64> = (0..v.len()).map(|j| j as f64 * h).collect();
        let mut value = holder_sup(&x, &v, alpha);
        if extended {
            // against the zero extension, the nearest outside point is the
            // window edge
            let edge = v.iter().enumerate().map(|(j, w)| {
                let d = (j.min(v.len() - 1 - j) as f64 * h).max(h);
                w.abs() / d.powf(alpha)
            });
            value = edge.fold(value, f64::max);
        }
        return Ok(Seminorm {
            value,
            error_bar: 0.0,
            divergent: false,
            roughness: f64::INFINITY,
            refinement: Vec::new(),
        });
    }
    Ok(seminorm_of(&v, h, alpha, p, extended))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{uniform_grid, LineFunction};
    use crate::numerics::quad::gauss_legendre;

    #[test]
    fn constant_has_zero_seminorm() {
        let g = uniform_grid(0.0, 1.0, 256).unwrap();
        let u = SampledFunction::from_fn(g, |_| 3.0).unwrap();
        let s = gagliardo_seminorm(&u, 0.4, 2.0).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(!s.divergent);
    }

    #[test]
    fn linear_matches_closed_form() {
        // [x]^2 on (0,1) = 2∫_0^1 (1-t) t^{1-2α} dt = 2/((2-2α)(3-2α))
        let alpha: f64 = 0.25;
        let exact = (2.0 / ((2.0 - 2.0 * alpha) * (3.0 - 2.0 * alpha))).sqrt();
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let u = SampledFunction::from_fn(g, |x| x).unwrap();
        let s = gagliardo_seminorm(&u, alpha, 2.0).unwrap();
        assert!((s.value - exact).abs() / exact < 1e-3, "{} vs {exact}", s.value);
        // the bar covers the diagonal band; log-Simpson adds ~1e-7
        assert!(s.value + s.error_bar >= exact * (1.0 - 1e-6));
        let g2 = uniform_grid(0.0, 1.0, 2048).unwrap();
        let u2 = SampledFunction::from_fn(g2, |x| x).unwrap();
        let s2 = gagliardo_seminorm(&u2, alpha, 2.0).unwrap();
        assert!((s2.value - s.value).abs() / s.value < 1e-2);
    }

    #[test]
    fn line_gaussian_closed_form() {
        // u = e^{-x²/2}: ∫(u(x+t)-u(x))^2 dx = 2√π(1 - e^{-t²/4}), so
        // [u]^2 at α = 1/2 is 4√π ∫_0^∞ (1 - e^{-t²/4}) t^{-2} dt = 2π
        let exact = 2.0 * std::f64::consts::PI;
        let u = LineFunction::from_fn(16.0, 4096, |x| (-x * x / 2.0).exp()).unwrap();
        let s = gagliardo_seminorm(&u, 0.5, 2.0).unwrap();
        let lo = s.value * s.value;
        let hi = (s.value + s.error_bar).powi(2);
        assert!(lo <= exact && exact <= hi * (1.0 + 1e-6), "{lo} {exact} {hi}");
        assert!((exact - lo) / exact < 2e-3);
    }

    #[test]
    fn line_offsets_against_quadrature() {
        let alpha = 0.3;
        let inner = |t: f64| 2.0 * std::f64::consts::PI.sqrt() * (1.0 - (-t * t / 4.0).exp());
        let f = |s: f64| {
            let t = s.exp();
            inner(t) * t.powf(-2.0 * alpha)
        };
        let tail = 2.0 * std::f64::consts::PI.sqrt() * 400f64.powf(-2.0 * alpha) / (2.0 * alpha);
        let exact = 2.0 * (gauss_legendre(f, -12.0, 400f64.ln(), 200, 20) + tail);
        let u = LineFunction::from_fn(16.0, 4096, |x| (-x * x / 2.0).exp()).unwrap();
        let s = gagliardo_seminorm(&u, alpha, 2.0).unwrap();
        let rel = (s.value * s.value - exact).abs() / exact;
        assert!(rel < 1e-4, "{} vs {exact}", s.value * s.value);
    }

    #[test]
    fn step_is_rough() {
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let u = SampledFunction::from_fn(g, |x| if x < 0.5 { 0.0 } else { 1.0 }).unwrap();
        let s = gagliardo_seminorm(&u, 0.6, 2.0).unwrap();
        assert!(s.divergent && s.value.is_infinite());
        assert!(s.refinement.windows(2).all(|w| w[1].1 > w[0].1));
        let t = gagliardo_seminorm(&u, 0.25, 2.0).unwrap();
        assert!(!t.divergent && t.value.is_finite());
    }

    #[test]
    fn holder_branch() {
        let g = uniform_grid(0.0, 1.0, 64).unwrap();
        let u = SampledFunction::from_fn(g, |x| x).unwrap();
        let s = gagliardo_seminorm(&u, 0.5, f64::INFINITY).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }
}
