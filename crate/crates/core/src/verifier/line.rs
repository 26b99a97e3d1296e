use std::f64::consts::PI;

use super::report::{relative_gap, ReportInputs, TestBattery, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, LineFunction, Side};
use crate::operators::{marchaud_derivative, spectral_derivative};
use crate::spaces::{gagliardo_seminorm, lp_norm_line, spectral_moment};

/// Slack on the `p = 1` bound.
pub const MARCHAUD_SLACK: f64 = 0.05;
/// Tolerance of the spectral identities.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Largest relative spread of the Gagliardo-to-moment ratio.
pub const BAND_SPREAD: f64 = 0.02;

/// `[u]^2_{W^{α,2}} / ∫|ξ|^{2α}|û|^2` on the line: `1 / (Γ(1+2α) sin πα)`.
pub fn gagliardo_spectral_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(1.0 / (gamma_fn(1.0 + 2.0 * alpha)? * (PI * alpha).sin()))
}

/// Equivalences on the line for decaying members, sampled on `[-L, L]`
/// with `n` cells:
///
/// 1. `‖D^α u‖_1 ≤ α/Γ(1-α) [u]_{α,1}` with the Marchaud derivative
///    (ratio at most `1.05`);
/// 2. Plancherel, `‖F^{-1}(iξ)^α û‖_2^2 = (2π)^{-1} ∫|ξ|^{2α}|û|^2`;
/// 3. `[u]^2_{α,2} / ∫|ξ|^{2α}|û|^2` constant over the family, and the left
///    and right spectral norms equal.
///
/// Ratios are the `p = 1` quotients; residuals are the spectral gaps over
/// `1e-10` and the spread over 2%, so the report tolerance is 1.
pub fn check_line_equivalences(family: &TestBattery, alpha: f64, half_width: f64, n: usize) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if family.is_empty() {
        return Err(Error::domain("empty family"));
    }
    let c_alpha = alpha * gamma_fn(1.0 - alpha)?.recip();
    let mut inputs = ReportInputs::new(family.labels(), alpha).with_variant("line");
    inputs.domain = Some([-half_width, half_width]);
    inputs.grid_sizes.push(n);
    let mut report = VerificationReport::new("line_equivalences", inputs, 1.0);
    report.ratio_bound = Some(1.0 + MARCHAUD_SLACK);
    let mut band = Vec::new();
    let (mut worst_plancherel, mut worst_sides) = (0.0f64, 0.0f64);
    for f in &family.members {
        let cf = f.resolve_line(half_width);
        let u = LineFunction::from_fn(half_width, n, |x| cf.eval(x))?;
        if !u.decay_checked() {
            return Err(Error::Support(format!("{f} does not decay inside [-{half_width}, {half_width}]")));
        }
        let scale = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let m = marchaud_derivative(&u, alpha, Side::Left)?.value;
        let lhs = lp_norm_line(&m, 1.0)?;
        let semi1 = gagliardo_seminorm(&u, alpha, 1.0)?.value;
        report.ratios.push(if scale == 0.0 { 0.0 } else { lhs / (c_alpha * semi1) });

        let moment = spectral_moment(&u, alpha)?.value;
        let target = (moment / (2.0 * PI)).sqrt();
        let left = lp_norm_line(&spectral_derivative(&u, alpha, Side::Left)?.value, 2.0)?;
        let right = lp_norm_line(&spectral_derivative(&u, alpha, Side::Right)?.value, 2.0)?;
        let plancherel = relative_gap(left, target, target);
        let sides = relative_gap(left, right, left);
        worst_plancherel = worst_plancherel.max(plancherel);
        worst_sides = worst_sides.max(sides);
        report.residuals.push(plancherel / SPECTRAL_TOL);
        report.residuals.push(sides / SPECTRAL_TOL);

        if scale > 0.0 {
            let semi2 = gagliardo_seminorm(&u, alpha, 2.0)?.value;
            band.push(semi2 * semi2 / moment);
        }
    }
    let spread = if band.is_empty() {
        0.0
    } else {
        let lo = band.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = band.iter().copied().fold(0.0, f64::max);
        let mean = band.iter().sum::<f64>() / band.len() as f64;
        report.metric("band_mean", mean);
        report.metric("band_min", lo);
        report.metric("band_max", hi);
        (hi - lo) / mean
    };
    report.residuals.push(spread / BAND_SPREAD);
    report.metric("band_spread", spread);
    report.metric("band_expected", gagliardo_spectral_constant(alpha)?);
    report.metric("marchaud_constant", c_alpha);
    report.metric("max_marchaud_ratio", report.ratios.iter().copied().fold(0.0, f64::max));
    report.metric("plancherel_gap", worst_plancherel);
    report.metric("side_gap", worst_sides);
    report.note("ratios = ‖Marchaud D^α u‖_1 / (α/Γ(1-α) [u]_{α,1}); residuals = Plancherel and left/right gaps over 1e-10, band spread over 2%");
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_at_one_half_is_one() {
        assert!((gagliardo_spectral_constant(0.5).unwrap() - 1.0).abs() < 1e-14);
        // α = 1/4: 1 / (Γ(3/2) sin(π/4)) = 2 / √(π/2)
        let c = gagliardo_spectral_constant(0.25).unwrap();
        assert!((c - 2.0 / (PI / 2.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gaussian_battery() {
        let fam = TestBattery::parse(&[
            "gauss:mu=0;s=1",
            "gauss:mu=0.5;s=0.7",
            "gauss:mu=-1;s=1.5",
            "gauss:mu=0;s=0.5",
            "gauss:mu=0.3;s=1.2",
        ])
        .unwrap();
        let r = check_line_equivalences(&fam, 0.5, 32.0, 4096).unwrap();
        assert!(r.passed, "{} {:?} {:?}", r.summary(), r.ratios, r.metrics);
        assert!((r.metrics["band_mean"] - r.metrics["band_expected"]).abs() < 2e-2);
    }

    #[test]
    fn zero_function() {
        let fam = TestBattery::parse(&["const:0"]).unwrap();
        let r = check_line_equivalences(&fam, 0.4, 8.0, 512).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.ratios, vec![0.0]);
        assert_eq!(r.metrics["band_spread"], 0.0);
    }

    #[test]
    fn decay_is_required() {
        let fam = TestBattery::parse(&["gauss:mu=0;s=4"]).unwrap();
        assert!(matches!(check_line_equivalences(&fam, 0.5, 4.0, 256), Err(Error::Support(_))));
    }
}
