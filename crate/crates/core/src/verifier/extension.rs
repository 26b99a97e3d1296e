use super::report::{ReportInputs, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::quad::gauss_legendre;
use crate::numerics::{gamma_fn, Grid, SampledFunction, Side, Singular};
use crate::operators::rl_derivative;
use crate::spaces::{lp_norm_detailed, sobolev_norm, NormFamily, NormSpec};

/// Tolerance on the pollution tail against the kernel integral.
pub const TAIL_TOL: f64 = 1e-2;
/// Tolerance on the decay exponent of the pollution tail.
pub const SLOPE_TOL: f64 = 0.05;
/// Nodal agreement required where an extension must reproduce `u`.
pub const COPY_TOL: f64 = 1e-12;
/// Tail points closer to the support than this many support widths are
/// left out of the slope fit.
const FAR_FIELD: f64 = 20.0;

/// `0` for `t <= 0`, `1` for `t >= 1`, smooth in between.
pub(crate) fn smooth_step(t: f64) -> f64 {
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        f(t) / (f(t) + f(1.0 - t))
    }
}

/// Index of the node of `ambient` at `x`, if there is one.
fn node_of(ambient: &Grid, x: f64) -> Option<usize> {
    let s = (x - ambient.a()) / ambient.h();
    let j = s.round();
    ((s - j).abs() < 1e-6 && j >= 0.0 && j as usize <= ambient.n()).then_some(j as usize)
}

/// Zero padding of `u` onto `ambient`, which must share the spacing of
/// `u`'s grid and carry its endpoints as nodes.
fn pad(u: &SampledFunction, ambient: &Grid) -> Result<(SampledFunction, usize)> {
    let g = u.grid();
    if (ambient.h() - g.h()).abs() > 1e-9 * g.h() {
        return Err(Error::domain("ambient grid must have the spacing of the input grid"));
    }
    let (Some(off), Some(_)) = (node_of(ambient, g.a()), node_of(ambient, g.b())) else {
        return Err(Error::domain("ambient grid must contain the interval with its endpoints as nodes"));
    };
    let mut values = vec![0.0; ambient.len()];
    values[off..=off + g.n()].copy_from_slice(u.values());
    Ok((SampledFunction::new(*ambient, values)?, off))
}

/// First and last nodes where `u` is not negligible.
fn support(u: &SampledFunction) -> Option<(usize, usize)> {
    let tiny = 1e-14 * u.max_abs();
    let vals = u.values();
    let lo = vals.iter().position(|v| v.abs() > tiny)?;
    let hi = vals.iter().rposition(|v| v.abs() > tiny)?;
    Some((lo, hi))
}

fn one_sided(u: &SampledFunction, alpha: f64, p: f64, side: Side) -> Result<f64> {
    Ok(sobolev_norm(u, &NormSpec::new(NormFamily::one_sided(side), alpha, p)?)?.value)
}

fn norm_ratio(ext: f64, base: f64) -> f64 {
    if ext == 0.0 && base == 0.0 {
        0.0
    } else {
        ext / base
    }
}

/// Zero extension of a compactly supported `u` onto `ambient`.
///
/// The report holds, as residuals normalised by their tolerances:
/// the pollution tail `D^α ũ` beyond the support against the kernel
/// integral `(1/Γ(-α)) ∫ u(y) |x - y|^{-1-α} dy`, and the log-log slope of
/// that tail against `-(1 + α)`. The norm ratio
/// `‖ũ‖ / ‖u‖` (one-sided family of `side`) is the ratio entry.
pub fn extend_trivial(
    u: &SampledFunction,
    alpha: f64,
    p: f64,
    side: Side,
    ambient: Grid,
) -> Result<(SampledFunction, VerificationReport)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let g = *u.grid();
    if u.singular().any() {
        return Err(Error::Support("input is singular at the boundary".into()));
    }
    let n = g.n();
    if let Some((lo, hi)) = support(u) {
        if lo == 0 || hi == n {
            return Err(Error::Support("input does not vanish near the boundary".into()));
        }
    }
    let (ext, off) = pad(u, &ambient)?;
    let mut inputs = ReportInputs::new(vec!["sampled".into()], alpha).on(&g).with_p(p).with_side(side);
    inputs.grid_sizes.push(ambient.n());
    inputs.domain = Some([ambient.a(), ambient.b()]);
    let mut report = VerificationReport::new("extend_trivial", inputs, 1.0);

    let base = one_sided(u, alpha, p, side)?;
    let extended = one_sided(&ext, alpha, p, side)?;
    report.metric("norm", base);
    report.metric("extension_norm", extended);
    report.ratios.push(norm_ratio(extended, base));

    let Some((lo, hi)) = support(u) else {
        report.residuals.extend([0.0, 0.0]);
        report.note("zero input: extension and tail vanish");
        return Ok((ext, report.finish()));
    };
    let (c, d) = (g.node(lo.saturating_sub(1)), g.node((hi + 1).min(n)));
    let width = d - c;
    let d_ext = rl_derivative(&ext, alpha, side)?;
    // tail nodes on the far side of the support, log spaced in distance
    let (first, last) = match side {
        Side::Left => (off + hi + 2, ambient.n()),
        Side::Right => ((off + lo).saturating_sub(2), 0),
    };
    let dist = |j: usize| match side {
        Side::Left => ambient.node(j) - d,
        Side::Right => c - ambient.node(j),
    };
    let span = first.abs_diff(last);
    if span < 8 {
        return Err(Error::domain("ambient grid leaves no room for the pollution tail"));
    }
    let mut tail: Vec<usize> = (0..48)
        .map(|k| {
            let s = (span as f64).powf(k as f64 / 47.0).round() as usize;
            match side {
                Side::Left => first + s.min(span),
                Side::Right => first - s.min(span),
            }
        })
        .collect();
    tail.dedup();
    let k = 1.0 / gamma_fn(-alpha)?;
    let cells = (hi + 1).min(n) - lo.saturating_sub(1);
    let oracle: Vec<f64> = tail
        .iter()
        .map(|&j| {
            let x = ambient.node(j);
            k * gauss_legendre(|y| u.eval(y) * (x - y).abs().powf(-1.0 - alpha), c, d, cells, 6)
        })
        .collect();
    let peak = oracle.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail_err = tail
        .iter()
        .zip(&oracle)
        .map(|(&j, &o)| (d_ext.value(j) - o).abs() / o.abs().max(1e-3 * peak))
        .fold(0.0f64, f64::max);
    report.metric("tail_error", tail_err);
    report.residuals.push(tail_err / TAIL_TOL);

    let far: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&j| dist(j) >= FAR_FIELD * width && d_ext.value(j) != 0.0)
        .map(|&j| (dist(j).ln(), d_ext.value(j).abs().ln()))
        .collect();
    let spans = far.len() >= 8 && far.last().unwrap().0 - far[0].0 >= 4f64.ln();
    if spans {
        let m = far.len() as f64;
        let (sx, sy) = far.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / m, sy / m);
        let (num, den) = far
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
        let slope = num / den;
        report.metric("tail_slope", slope);
        report.residuals.push((slope + 1.0 + alpha).abs() / SLOPE_TOL);
    } else {
        report.note(format!(
            "slope probe skipped: the ambient tail does not reach {FAR_FIELD} support widths over a factor 4"
        ));
    }
    report.note(format!(
        "residuals: tail error/{TAIL_TOL}, |slope + 1 + alpha|/{SLOPE_TOL}; ratio = extension norm / norm"
    ));
    Ok((ext, report.finish()))
}

/// `Eu = u ψ` zero-padded onto `(a - w, b + w)`, with `ψ = 1` on the inner
/// interval and supported in a compact `K` halfway to the boundary.
///
/// Residuals (normalised): nodal equality on the inner interval, leakage
/// outside `K`, and the drift of the norm ratio when `u` is refined once.
pub fn extend_interior(
    u: &SampledFunction,
    alpha: f64,
    p: f64,
    side: Side,
    inner: (f64, f64),
) -> Result<(SampledFunction, VerificationReport)> {
    let g = *u.grid();
    let (c, d) = inner;
    let h = g.h();
    if !(c - g.a() >= h && g.b() - d >= h && d > c) {
        return Err(Error::domain(format!(
            "inner interval ({c}, {d}) must lie inside ({}, {}) away from the boundary",
            g.a(),
            g.b()
        )));
    }
    let delta = 0.5 * (c - g.a()).min(g.b() - d);
    let k = (c - delta, d + delta);
    let psi = |x: f64| {
        if x < c {
            smooth_step((x - k.0) / delta)
        } else if x > d {
            smooth_step((k.1 - x) / delta)
        } else {
            1.0
        }
    };
    let build = |u: &SampledFunction| -> Result<(SampledFunction, f64, f64)> {
        let g = *u.grid();
        let values: Vec<f64> = (0..=g.n())
            .map(|j| {
                let w = psi(g.node(j));
                if w == 0.0 {
                    0.0
                } else {
                    w * u.value(j)
                }
            })
            .collect();
        let cut = SampledFunction::with_singular(g, values, Singular::NONE)?;
        let w = g.width();
        let ambient = Grid::new(g.a() - w, g.b() + w, 3 * g.n())?;
        let (ext, _) = pad(&cut, &ambient)?;
        let ratio = norm_ratio(one_sided(&ext, alpha, p, side)?, one_sided(u, alpha, p, side)?);
        Ok((ext, ratio, w))
    };
    let (ext, ratio, w) = build(u)?;
    let (_, fine_ratio, _) = build(&u.refine(2)?)?;
    let amb = ext.grid();
    let mut copy_err = 0.0f64;
    let mut leak = 0.0f64;
    for j in 0..=amb.n() {
        let x = amb.node(j);
        let v = ext.value(j);
        if x >= c && x <= d {
            copy_err = copy_err.max((v - u.eval(x)).abs());
        } else if x < k.0 || x > k.1 {
            leak = leak.max(v.abs());
        }
    }
    let drift = if ratio == 0.0 && fine_ratio == 0.0 { 0.0 } else { (fine_ratio / ratio - 1.0).abs() };
    let mut inputs = ReportInputs::new(vec!["sampled".into()], alpha).on(&g).with_p(p).with_side(side);
    inputs.grid_sizes.push(3 * g.n());
    inputs.domain = Some([g.a() - w, g.b() + w]);
    let mut report = VerificationReport::new("extend_interior", inputs, 1.0);
    report.metric("copy_error", copy_err);
    report.metric("leak", leak);
    report.metric("ratio_drift", drift);
    report.metric("support_lo", k.0);
    report.metric("support_hi", k.1);
    report.residuals.extend([copy_err / COPY_TOL, leak / COPY_TOL, drift / 0.1]);
    report.ratios.push(ratio);
    report.note(format!(
        "residuals: copy error/{COPY_TOL}, leak outside K/{COPY_TOL}, ratio drift under refinement/0.1"
    ));
    Ok((ext, report.finish()))
}

/// Extension of `u` (with `αp < 1`) onto `(a - w, b + w)`: zero on the
/// left, `u` on the interval, the shifted copy `u(x - w)` on the right,
/// multiplied by a cutoff that falls from 1 to 0 over `(b, b + w/4)`.
/// The right-sided version is the reflection.
///
/// Residuals (normalised): nodal equality on the interval and leakage
/// outside the support. The ratio entry is
/// `C = ‖Eu‖ / (‖u‖ + ‖u‖_{L^μ})`.
pub fn extend_exterior(
    u: &SampledFunction,
    alpha: f64,
    p: f64,
    mu: f64,
    side: Side,
) -> Result<(SampledFunction, VerificationReport)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if alpha * p >= 1.0 {
        return Err(Error::hypothesis(format!("exterior extension needs alpha*p < 1, got {}", alpha * p)));
    }
    let bound = p / (1.0 - alpha * p);
    if !(mu > bound) {
        return Err(Error::hypothesis(format!("mu = {mu} must exceed p/(1 - alpha*p) = {bound}")));
    }
    if u.singular().any() {
        return Err(Error::domain("the shifted copy of a singular endpoint would sit inside the ambient interval"));
    }
    let lmu = lp_norm_detailed(u, mu)?;
    if lmu.divergent || !lmu.value.is_finite() {
        return Err(Error::hypothesis(format!("the L^{mu} norm of the input diverges")));
    }
    let src = match side {
        Side::Left => u.clone(),
        Side::Right => u.reflect(),
    };
    let g = *src.grid();
    let (n, w) = (g.n(), g.width());
    let ambient = Grid::new(g.a() - w, g.b() + w, 3 * n)?;
    let cutoff = |x: f64| 1.0 - smooth_step((x - g.b()) / (0.25 * w));
    let mut values = vec![0.0; ambient.len()];
    values[n..=2 * n].copy_from_slice(src.values());
    for (j, v) in values.iter_mut().enumerate().skip(2 * n + 1) {
        // node j sits at b + (j - 2n) h, its copy at a + (j - 2n) h
        *v = cutoff(ambient.node(j)) * src.value(j - 2 * n);
    }
    let mut ext = SampledFunction::new(ambient, values)?;
    if side == Side::Right {
        ext = ext.reflect();
    }
    let amb = *ext.grid();
    let mut copy_err = 0.0f64;
    for j in n..=2 * n {
        copy_err = copy_err.max((ext.value(j) - u.value(j - n)).abs());
    }
    // support: [a, b + w/4] on the left, [a - w/4, b] on the right
    let (s_lo, s_hi) = match side {
        Side::Left => (u.grid().a(), u.grid().b() + 0.25 * w),
        Side::Right => (u.grid().a() - 0.25 * w, u.grid().b()),
    };
    let h = amb.h();
    let leak = (0..=amb.n())
        .filter(|&j| amb.node(j) < s_lo - 0.5 * h || amb.node(j) > s_hi + 0.5 * h)
        .fold(0.0f64, |m, j| m.max(ext.value(j).abs()));
    let base = one_sided(u, alpha, p, side)?;
    let extended = one_sided(&ext, alpha, p, side)?;
    let mut inputs = ReportInputs::new(vec!["sampled".into()], alpha).on(u.grid()).with_p(p).with_side(side);
    inputs.q = Some(mu);
    inputs.grid_sizes.push(3 * n);
    inputs.domain = Some([amb.a(), amb.b()]);
    let mut report = VerificationReport::new("extend_exterior", inputs, 1.0);
    report.metric("norm", base);
    report.metric("lmu_norm", lmu.value);
    report.metric("extension_norm", extended);
    report.metric("copy_error", copy_err);
    report.metric("leak", leak);
    report.residuals.extend([copy_err / COPY_TOL, leak / COPY_TOL]);
    report.ratios.push(norm_ratio(extended, base + lmu.value));
    report.note(format!(
        "residuals: copy error/{COPY_TOL}, leak outside the support/{COPY_TOL}; ratio = extension norm / (norm + L^mu norm)"
    ));
    Ok((ext, report.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FunctionSpec;

    fn sampled(spec: &str, n: usize) -> SampledFunction {
        FunctionSpec::parse(spec).unwrap().resolve(0.0, 1.0).sample(Grid::new(0.0, 1.0, n).unwrap()).unwrap()
    }

    #[test]
    fn smooth_step_shape() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.2), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert!((smooth_step(0.3) + smooth_step(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pollution_tail_decays_like_the_kernel() {
        let u = sampled("bump:c=0.5;r=0.05", 512);
        let ambient = Grid::new(-1.0, 17.0, 512 * 18).unwrap();
        for alpha in [0.25, 0.5] {
            let (ext, r) = extend_trivial(&u, alpha, 2.0, Side::Left, ambient).unwrap();
            assert!(r.passed, "{}", r.summary());
            assert!((r.metrics["tail_slope"] + 1.0 + alpha).abs() <= SLOPE_TOL);
            assert!(r.metrics["tail_error"] <= TAIL_TOL);
            assert!(r.ratios[0] >= 1.0);
            assert_eq!(ext.value(512 + 256), u.value(256));
        }
    }

    #[test]
    fn trivial_extension_guards() {
        let ambient = Grid::new(-1.0, 2.0, 3 * 256).unwrap();
        let one = sampled("const:1", 256);
        assert!(matches!(
            extend_trivial(&one, 0.5, 2.0, Side::Left, ambient),
            Err(Error::Support(_))
        ));
        let zero = sampled("const:0", 256);
        let (ext, r) = extend_trivial(&zero, 0.5, 2.0, Side::Left, ambient).unwrap();
        assert!(ext.values().iter().all(|&v| v == 0.0));
        assert!(r.residuals.iter().all(|&v| v == 0.0));
        let coarse = Grid::new(-1.0, 2.0, 300).unwrap();
        assert!(extend_trivial(&sampled("bump:c=0.5;r=0.2", 256), 0.5, 2.0, Side::Left, coarse).is_err());
    }

    #[test]
    fn interior_extension_reproduces_u() {
        for spec in ["const:1", "kappa:alpha=0.5;side=left", "pow:a=0;terms=1*1.3"] {
            let u = sampled(spec, 512);
            let (ext, r) = extend_interior(&u, 0.5, 1.5, Side::Left, (0.25, 0.75)).unwrap();
            assert!(r.passed, "{spec}: {}", r.summary());
            assert!(r.metrics["copy_error"] <= COPY_TOL);
            assert!(r.ratios[0].is_finite());
            assert!(!ext.singular().any());
        }
        let u = sampled("const:1", 64);
        assert!(extend_interior(&u, 0.5, 1.5, Side::Left, (0.0, 0.75)).is_err());
    }

    #[test]
    fn exterior_extension() {
        let one = sampled("const:1", 512);
        for side in [Side::Left, Side::Right] {
            let (_, r) = extend_exterior(&one, 0.25, 2.0, 5.0, side).unwrap();
            assert!(r.passed, "{}", r.summary());
            assert!(r.ratios[0].is_finite() && r.ratios[0] > 0.0);
        }
        assert!(matches!(extend_exterior(&one, 0.6, 2.0, 50.0, Side::Left), Err(Error::Hypothesis(_))));
        assert!(matches!(extend_exterior(&one, 0.25, 2.0, 4.0, Side::Left), Err(Error::Hypothesis(_))));
        let k = sampled("kappa:alpha=0.5;side=left", 512);
        assert!(extend_exterior(&k, 0.25, 2.0, 5.0, Side::Left).is_err());
    }

    #[test]
    fn exterior_of_a_bump_is_the_trivial_extension() {
        let u = sampled("bump:c=0.5;r=0.2", 256);
        let (ext, r) = extend_exterior(&u, 0.25, 2.0, 5.0, Side::Left).unwrap();
        let ambient = Grid::new(-1.0, 2.0, 3 * 256).unwrap();
        let (triv, t) = extend_trivial(&u, 0.25, 2.0, Side::Left, ambient).unwrap();
        assert_eq!(ext.values(), triv.values());
        let a = r.metrics["extension_norm"];
        assert!((a - t.metrics["extension_norm"]).abs() <= 1e-6 * a);
    }
}
