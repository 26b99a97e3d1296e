use super::inequalities::STABILITY_DRIFT;
use super::pairing::base_point;
use super::report::{guarded_ratio, interior, interior_rel_linf, resolve, sample, ReportInputs, TestBattery, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::{rgamma, Grid, SampledFunction, Side};
use crate::operators::{caputo_derivative, rl_derivative};
use crate::oracle::{ClosedForm, FunctionSpec};
use crate::spaces::{holder_quotient, lp_norm_detailed, sobolev_norm, NormFamily, NormSpec};

/// Exponent offset of the sharpness probe.
pub const SHARPNESS_OFFSET: f64 = 0.1;

/// Relative growth of `later` over `earlier`, zero for two negligible values.
fn growth(earlier: f64, later: f64, scale: f64) -> f64 {
    if later <= earlier || later <= 1e-12 * scale {
        0.0
    } else if earlier == 0.0 {
        f64::INFINITY
    } else {
        later / earlier - 1.0
    }
}

/// Hölder quotients of `x^e` (anchored at the base of `side`) near the base
/// at exponents `e` and `e + SHARPNESS_OFFSET`, as growth factors under one
/// doubling of `grid`.
fn sharpness(e: f64, side: Side, grid: &Grid) -> Result<(f64, f64)> {
    let (a, b) = (grid.a(), grid.b());
    let f = ClosedForm::power(base_point(grid, side), side, vec![(1.0, e)]);
    let sub = match side {
        Side::Left => (a, a + 0.125 * grid.width()),
        Side::Right => (b - 0.125 * grid.width(), b),
    };
    let mut q = Vec::new();
    for g in [*grid, grid.refine(2)?] {
        let u = f.sample(g)?;
        q.push([holder_quotient(&u, e, sub)?, holder_quotient(&u, (e + SHARPNESS_OFFSET).min(1.0), sub)?]);
    }
    Ok((q[1][0] / q[0][0], q[1][1] / q[0][1]))
}

/// Trace inequality and Hölder embedding for `αp > 1`.
///
/// For each member, at `n` and `2n`: the Hölder quotient of exponent
/// `α - 1/p` on `[c, b]` (left) or `[a, c]` (right), and the ratio of the
/// far-end value to the one-sided norm. Residuals are the growth of both
/// under refinement over 10%. Members outside the space (infinite norm)
/// keep ratio 0. The sharpness probe runs on `x^{α-1/p}`: its quotient is
/// stable at the critical exponent and grows like `2^{0.1}` per doubling
/// at `α - 1/p + 0.1`.
pub fn check_embedding_trace(
    family: &TestBattery,
    alpha: f64,
    p: f64,
    c: f64,
    side: Side,
    grid: Grid,
) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if !(p.is_finite() && alpha * p > 1.0) {
        return Err(Error::hypothesis(format!(
            "the embedding needs finite p and alpha*p > 1, got {}",
            alpha * p
        )));
    }
    let (a, b) = (grid.a(), grid.b());
    if !(c > a && c < b) {
        return Err(Error::domain(format!("c = {c} is not inside ({a}, {b})")));
    }
    if family.is_empty() {
        return Err(Error::domain("empty family"));
    }
    let e = alpha - 1.0 / p;
    let sub = match side {
        Side::Left => (c, b),
        Side::Right => (a, c),
    };
    let spec = NormSpec::new(NormFamily::one_sided(side), alpha, p)?;
    let inputs = ReportInputs::new(family.labels(), alpha).on(&grid).with_p(p).with_side(side);
    let mut report = VerificationReport::new("embedding_trace", inputs, 1.0);
    report.inputs.grid_sizes.push(2 * grid.n());
    let (mut max_q, mut max_r, mut max_r_coarse) = (0.0f64, 0.0f64, 0.0f64);
    let mut outside = Vec::new();
    for f in &family.members {
        let mut q = [0.0; 2];
        let mut r = [0.0; 2];
        let mut peak = 0.0f64;
        for (k, g) in [grid, grid.refine(2)?].into_iter().enumerate() {
            let u = sample(f, &g)?;
            let far = match side {
                Side::Left => g.n(),
                Side::Right => 0,
            };
            if u.is_flagged(far) {
                return Err(Error::domain(format!("{f} is unbounded at the trace point")));
            }
            q[k] = holder_quotient(&u, e, sub)?;
            let norm = sobolev_norm(&u, &spec)?;
            let t = u.value(far).abs();
            r[k] = if norm.value.is_finite() { guarded_ratio(t, norm.value, 1.0) } else { 0.0 };
            if k == 0 && !norm.value.is_finite() {
                outside.push(f.to_string());
            }
            peak = peak.max(u.max_abs());
        }
        report.residuals.push(growth(q[0], q[1], peak) / STABILITY_DRIFT);
        report.residuals.push(relative_change(r[0], r[1]) / STABILITY_DRIFT);
        report.ratios.push(r[1]);
        max_q = max_q.max(q[1]);
        max_r = max_r.max(r[1]);
        max_r_coarse = max_r_coarse.max(r[0]);
    }
    report.metric("holder_exponent", e);
    report.metric("holder_constant", max_q);
    report.metric("trace_constant", max_r);
    report.metric("trace_constant_n", max_r_coarse);
    let (critical, perturbed) = sharpness(e, side, &grid)?;
    report.metric("sharpness_growth_critical", critical);
    report.metric("sharpness_growth_perturbed", perturbed);
    if !outside.is_empty() {
        report.note(format!("infinite norm (ratio 0): {}", outside.join(", ")));
    }
    report.note("residuals = growth of the Hölder quotient and change of |Tu|/‖u‖ under doubling, over 10%");
    Ok(report.finish())
}

fn relative_change(x: f64, y: f64) -> f64 {
    let m = x.abs().max(y.abs());
    if m == 0.0 {
        0.0
    } else {
        (x - y).abs() / m
    }
}

/// Consistency with `W^{1,p}`: `D^α u = u(a) (x-a)^{-α} / Γ(1-α) + I^{1-α} u'`
/// (left; mirrored on the right), with the left side from the L1 scheme
/// and the right side from the boundary value plus the Caputo derivative.
///
/// Also probes the inclusion threshold: `‖D^α u‖_p` is finite if and only
/// if `u(a) = 0` or `αp < 1`.
pub fn check_consistency_w1p(u: &FunctionSpec, alpha: f64, p: f64, side: Side, grid: Grid) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let f = resolve(u, &grid);
    if !f.continuous_on(grid.a(), grid.b()) {
        return Err(Error::hypothesis(format!("{u} is not continuous up to the boundary")));
    }
    let us = sample(u, &grid)?;
    let base = base_point(&grid, side);
    let u0 = f.eval(base);
    let lhs = rl_derivative(&us, alpha, side)?;
    let caputo = caputo_derivative(&us, alpha, side)?;
    let k = u0 * rgamma(1.0 - alpha);
    let boundary = SampledFunction::from_fn(grid, |x| {
        let d = (x - base).abs();
        if d == 0.0 {
            0.0
        } else {
            k * d.powf(-alpha)
        }
    })?;
    let rhs = boundary.add(&caputo)?;
    let inputs = ReportInputs::new(vec![u.to_string()], alpha).on(&grid).with_p(p).with_side(side);
    let mut report = VerificationReport::new("consistency_w1p", inputs, 1e-3);
    report.residuals.push(interior_rel_linf(&lhs, &rhs));
    let peak = |g: &SampledFunction| interior(&grid).fold(0.0f64, |m, j| m.max(g.value(j).abs()));
    report.ratios.push(guarded_ratio(peak(&lhs), peak(&rhs), peak(&us).max(1.0)));

    let vanishes = u0.abs() <= 1e-12 * us.max_abs().max(f64::MIN_POSITIVE);
    let predicted_finite = vanishes || alpha * p < 1.0;
    let observed_finite = !lp_norm_detailed(&lhs, p)?.divergent;
    report.residuals.push(if predicted_finite == observed_finite { 0.0 } else { 1.0 });
    report.metric("boundary_value", u0);
    report.metric("rl_caputo_gap", interior_rel_linf(&lhs, &caputo));
    report.metric("norm_finite", if observed_finite { 1.0 } else { 0.0 });
    report.note("residuals = interior rel L∞ of D^α u against the two-term form; inclusion mismatch (0 or 1)");
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn embedding_on_bumps_and_kernel() {
        let fam = TestBattery::parse(&[
            "bump:c=0.5;r=0.3",
            "bump:c=0.7;r=0.2;h=2",
            "bump:c=0.4;r=0.35",
            "kappa:alpha=0.75;side=left",
            "pow:a=0;terms=1*1.3",
        ])
        .unwrap();
        let r = check_embedding_trace(&fam, 0.75, 2.0, 0.25, Side::Left, grid(512)).unwrap();
        assert!(r.passed, "{} {:?}", r.summary(), r.residuals);
        // κ: |Tu| = 1, ‖κ‖_2 = √2 and D κ = 0
        assert!((r.ratios[3] - 0.5f64.sqrt()).abs() < 1e-2, "{}", r.ratios[3]);
        assert!(r.ratios.iter().all(|&x| x <= r.metrics["trace_constant"]));
        assert!((r.metrics["sharpness_growth_critical"] - 1.0).abs() < 1e-2);
        assert!((r.metrics["sharpness_growth_perturbed"] - 2f64.powf(0.1)).abs() < 1e-2);
    }

    #[test]
    fn embedding_on_constants_and_right_side() {
        let one = TestBattery::parse(&["const:1"]).unwrap();
        let r = check_embedding_trace(&one, 0.75, 2.0, 0.25, Side::Left, grid(256)).unwrap();
        assert!(r.passed);
        assert_eq!(r.metrics["holder_constant"], 0.0);
        // constants are outside the one-sided space when αp > 1
        assert_eq!(r.ratios[0], 0.0);
        let fam = TestBattery::parse(&["kappa:alpha=0.75;side=right", "bump:c=0.5;r=0.3"]).unwrap();
        let r = check_embedding_trace(&fam, 0.75, 2.0, 0.75, Side::Right, grid(256)).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!((r.ratios[0] - 0.5f64.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn embedding_guards() {
        let fam = TestBattery::parse(&["bump:c=0.5;r=0.3"]).unwrap();
        assert!(matches!(
            check_embedding_trace(&fam, 0.5, 2.0, 0.25, Side::Left, grid(64)),
            Err(Error::Hypothesis(_))
        ));
        assert!(check_embedding_trace(&fam, 0.75, 2.0, 1.0, Side::Left, grid(64)).is_err());
        let k = TestBattery::parse(&["kappa:alpha=0.75;side=right"]).unwrap();
        assert!(check_embedding_trace(&k, 0.75, 2.0, 0.25, Side::Left, grid(64)).is_err());
    }

    #[test]
    fn caputo_form_on_affine_functions() {
        let u = FunctionSpec::parse("pow:a=0;terms=1*0,1*1").unwrap();
        for side in [Side::Left, Side::Right] {
            let r = check_consistency_w1p(&u, 0.5, 1.5, side, grid(2048)).unwrap();
            assert!(r.passed, "{side}: {}", r.summary());
            assert!(r.residuals[0] <= 1e-3);
            assert_eq!(r.metrics["norm_finite"], 1.0);
        }
    }

    #[test]
    fn caputo_form_on_bumps() {
        let u = FunctionSpec::parse("bump:c=0.5;r=0.3").unwrap();
        let r = check_consistency_w1p(&u, 0.4, 4.0, Side::Left, grid(2048)).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.metrics["boundary_value"], 0.0);
        assert_eq!(r.metrics["rl_caputo_gap"], r.residuals[0]);
        assert_eq!(r.metrics["norm_finite"], 1.0);
    }

    #[test]
    fn inclusion_threshold() {
        let one = FunctionSpec::parse("const:1").unwrap();
        let r = check_consistency_w1p(&one, 0.6, 2.0, Side::Left, grid(1024)).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.metrics["norm_finite"], 0.0);
        let r = check_consistency_w1p(&one, 0.25, 2.0, Side::Left, grid(1024)).unwrap();
        assert!(r.passed);
        assert_eq!(r.metrics["norm_finite"], 1.0);
        let step = FunctionSpec::parse("step:c=0.5;h=1").unwrap();
        assert!(matches!(
            check_consistency_w1p(&step, 0.5, 2.0, Side::Left, grid(64)),
            Err(Error::Hypothesis(_))
        ));
    }
}
