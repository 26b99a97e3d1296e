use serde::{Deserialize, Serialize};

use super::report::{guarded_ratio, resolve, sample, ReportInputs, TestBattery, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::{Grid, LineFunction, SampledFunction, Side, Singular};
use crate::operators::{endpoint_constant, kappa, rl_derivative, spectral_derivative};
use crate::oracle::FunctionSpec;
use crate::spaces::{is_regular, lp_norm, lp_norm_line, sobolev_conjugate};

/// Largest drift of the battery constant under grid doubling.
pub const STABILITY_DRIFT: f64 = 0.1;
/// A held-out function may exceed the battery constant by this factor.
pub const HELD_OUT_FACTOR: f64 = 1.5;
/// Largest spread of the dilation probe at the critical exponent.
pub const SCALING_DRIFT: f64 = 0.05;
/// Dilations of the scaling probe.
pub const DILATIONS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
/// Endpoint constants below this fraction of `‖u‖_1` count as zero.
pub const REGULARITY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoincareVariant {
    /// `‖u - c κ‖_p ≤ C ‖D u‖_p` for every `u`.
    KernelSubtracted,
    /// `‖u‖_p ≤ C ‖D u‖_p` for `u` with vanishing endpoint constant.
    Mathring,
    /// `‖u‖_p ≤ C ‖D u‖_p` for `u` continuous up to the boundary.
    Symmetric,
}

impl PoincareVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            PoincareVariant::KernelSubtracted => "kernel_subtracted",
            PoincareVariant::Mathring => "mathring",
            PoincareVariant::Symmetric => "symmetric",
        }
    }
}

/// Where [`check_sobolev_inequality`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SobolevDomain {
    /// Truncation `[-L, L]` with `n` cells.
    Line { half_width: f64, n: usize },
    Interval(Grid),
}

/// `u - c κ`, with the flag dropped when the kernel carried all of the
/// singularity (the remainder is then extended linearly to the end node).
pub(crate) fn kernel_remainder(u: &SampledFunction, alpha: f64, side: Side) -> Result<SampledFunction> {
    kernel_split(u, alpha, side).map(|(_, r)| r)
}

/// [`kernel_remainder`] together with the constant `c`.
pub(crate) fn kernel_split(u: &SampledFunction, alpha: f64, side: Side) -> Result<(f64, SampledFunction)> {
    let grid = *u.grid();
    let c = endpoint_constant(u, alpha, side)?.c_value;
    if c == 0.0 {
        return Ok((0.0, u.clone()));
    }
    let k = kappa(alpha, side, grid)?;
    let r = u.axpy(-c, &k)?;
    let n = grid.n();
    let (end, near, next) = match side {
        Side::Left => (0, 1, 2),
        Side::Right => (n, n - 1, n - 2),
    };
    if !r.is_flagged(end) || r.value(near).abs() > 1e-6 * (c * k.value(near)).abs() {
        return Ok((c, r));
    }
    let mut values = r.values().to_vec();
    values[end] = 2.0 * values[near] - values[next];
    let singular = match side {
        Side::Left => Singular { left: false, ..r.singular() },
        Side::Right => Singular { right: false, ..r.singular() },
    };
    Ok((c, SampledFunction::with_singular(grid, values, singular)?))
}

/// Ratios `lhs / rhs` of a battery at `n` and `2n` plus a held-out member.
struct RatioBattery {
    coarse: Vec<f64>,
    fine: Vec<f64>,
    held_out: f64,
}

impl RatioBattery {
    fn run(
        family: &TestBattery,
        held_out: &FunctionSpec,
        grid: Grid,
        sides: impl Fn(&FunctionSpec, &Grid) -> Result<(f64, f64)>,
    ) -> Result<Self> {
        let fine_grid = grid.refine(2)?;
        let ratio = |f: &FunctionSpec, g: &Grid| -> Result<f64> {
            let (lhs, rhs) = sides(f, g)?;
            if !rhs.is_finite() {
                return Err(Error::hypothesis(format!(
                    "{f}: the right-hand norm diverges, the function is outside the space"
                )));
            }
            Ok(guarded_ratio(lhs, rhs, lhs.abs().max(rhs.abs()).max(1.0)))
        };
        let mut coarse = Vec::with_capacity(family.len());
        let mut fine = Vec::with_capacity(family.len());
        for f in &family.members {
            coarse.push(ratio(f, &grid)?);
            fine.push(ratio(f, &fine_grid)?);
        }
        Ok(Self {
            coarse,
            fine,
            held_out: ratio(held_out, &fine_grid)?,
        })
    }

    fn record(self, report: &mut VerificationReport) {
        let max = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x));
        let (c, f) = (max(&self.coarse), max(&self.fine));
        let drift = if c == 0.0 && f == 0.0 { 0.0 } else { (f / c - 1.0).abs() };
        report.metric("constant_n", c);
        report.metric("constant_2n", f);
        report.metric("drift", drift);
        report.metric("held_out_ratio", self.held_out);
        report.residuals.push(drift / STABILITY_DRIFT);
        report.residuals.push(if f == 0.0 && self.held_out == 0.0 {
            0.0
        } else {
            self.held_out / (HELD_OUT_FACTOR * f)
        });
        report.ratios = self.fine;
        report.note(format!(
            "residuals are drift/{STABILITY_DRIFT} and held-out/({HELD_OUT_FACTOR} x battery max); ratios at the finer grid"
        ));
    }
}

fn check_family_size(family: &TestBattery) -> Result<()> {
    if family.len() < 10 {
        return Err(Error::domain(format!(
            "ratio batteries need at least 10 functions, got {}",
            family.len()
        )));
    }
    Ok(())
}

/// Poincaré-type inequality on a ratio battery: bounded, stable under grid
/// doubling and respected by a held-out function.
pub fn check_poincare(
    family: &TestBattery,
    held_out: &FunctionSpec,
    alpha: f64,
    p: f64,
    side: Side,
    variant: PoincareVariant,
    grid: Grid,
) -> Result<VerificationReport> {
    check_family_size(family)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    for f in family.members.iter().chain(std::iter::once(held_out)) {
        match variant {
            PoincareVariant::KernelSubtracted => {}
            PoincareVariant::Mathring => {
                if !is_regular(&sample(f, &grid)?, alpha, side, REGULARITY_TOL)? {
                    return Err(Error::hypothesis(format!("{f} has a nonzero endpoint constant")));
                }
            }
            PoincareVariant::Symmetric => {
                if !resolve(f, &grid).continuous_on(grid.a(), grid.b()) {
                    return Err(Error::hypothesis(format!("{f} is not continuous up to the boundary")));
                }
            }
        }
    }
    let battery = RatioBattery::run(family, held_out, grid, |f, g| {
        let u = sample(f, g)?;
        let lhs = match variant {
            PoincareVariant::KernelSubtracted => lp_norm(&kernel_remainder(&u, alpha, side)?, p, false)?,
            _ => lp_norm(&u, p, false)?,
        };
        let rhs = lp_norm(&rl_derivative(&u, alpha, side)?, p, false)?;
        Ok((lhs, rhs))
    })?;
    let mut functions = family.labels();
    functions.push(held_out.to_string());
    let mut inputs = ReportInputs::new(functions, alpha)
        .on(&grid)
        .with_p(p)
        .with_side(side)
        .with_variant(variant.as_str());
    inputs.grid_sizes.push(2 * grid.n());
    let mut report = VerificationReport::new("poincare", inputs, 1.0);
    battery.record(&mut report);
    Ok(report.finish())
}

/// Sobolev inequality with exponent `r`.
///
/// On the line the ratio is `‖u‖_r / ‖D u‖_p` with the spectral
/// derivative, and each member is dilated by [`DILATIONS`]: the ratio is
/// dilation invariant exactly at `r = p*`. On an interval the ratio is
/// `‖u - c κ‖_r / ‖D u‖_p` for `r ≤ p*`.
pub fn check_sobolev_inequality(
    family: &TestBattery,
    held_out: &FunctionSpec,
    alpha: f64,
    p: f64,
    r: f64,
    side: Side,
    domain: SobolevDomain,
) -> Result<VerificationReport> {
    check_family_size(family)?;
    let p_star = sobolev_conjugate(p, alpha)?;
    if !(r >= 1.0) {
        return Err(Error::domain(format!("exponent r = {r} must be at least 1")));
    }
    let mut functions = family.labels();
    functions.push(held_out.to_string());
    let mut inputs = ReportInputs::new(functions, alpha).with_p(p).with_side(side);
    inputs.q = Some(r);
    match domain {
        SobolevDomain::Interval(grid) => {
            if r > p_star * (1.0 + 1e-12) {
                return Err(Error::hypothesis(format!("r = {r} exceeds the Sobolev conjugate {p_star}")));
            }
            let battery = RatioBattery::run(family, held_out, grid, |f, g| {
                let u = sample(f, g)?;
                let lhs = lp_norm(&kernel_remainder(&u, alpha, side)?, r, false)?;
                let rhs = lp_norm(&rl_derivative(&u, alpha, side)?, p, false)?;
                Ok((lhs, rhs))
            })?;
            let mut inputs = inputs.on(&grid).with_variant("interval");
            inputs.grid_sizes.push(2 * grid.n());
            let mut report = VerificationReport::new("sobolev_inequality", inputs, 1.0);
            report.metric("p_star", p_star);
            battery.record(&mut report);
            Ok(report.finish())
        }
        SobolevDomain::Line { half_width, n } => {
            let grid = Grid::new(-half_width, half_width, n)?;
            let line_ratio = |f: &FunctionSpec, cells: usize, lambda: f64| -> Result<f64> {
                let cf = f.resolve_line(half_width);
                let u = LineFunction::from_fn(half_width, cells, |x| cf.eval(lambda * x))?;
                let d = spectral_derivative(&u, alpha, side)?.value;
                let lhs = lp_norm_line(&u, r)?;
                let rhs = lp_norm_line(&d, p)?;
                Ok(guarded_ratio(lhs, rhs, lhs.max(rhs).max(1.0)))
            };
            let mut inputs = inputs.on(&grid).with_variant("line");
            inputs.grid_sizes.push(2 * n);
            let mut report = VerificationReport::new("sobolev_inequality", inputs, 1.0);
            report.metric("p_star", p_star);
            let critical = (r - p_star).abs() <= 1e-9 * p_star;
            let (mut worst_spread, mut all_monotone, mut slope) = (0.0f64, true, 0.0);
            for f in &family.members {
                let probe = DILATIONS
                    .iter()
                    .map(|&l| line_ratio(f, n, l))
                    .collect::<Result<Vec<_>>>()?;
                let lo = probe.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = probe.iter().cloned().fold(0.0f64, f64::max);
                worst_spread = worst_spread.max(if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY });
                let up = probe.windows(2).all(|w| w[1] > w[0]);
                let down = probe.windows(2).all(|w| w[1] < w[0]);
                all_monotone &= up || down;
                let last = DILATIONS.len() - 1;
                slope += (probe[last] / probe[0]).ln() / DILATIONS[last].ln() / family.len() as f64;
            }
            // the predicted dilation exponent of the ratio
            let exponent = 1.0 / p_star - 1.0 / r;
            report.metric("scale_spread", worst_spread);
            report.metric("scale_monotone", if all_monotone { 1.0 } else { 0.0 });
            report.metric("scale_exponent", exponent);
            report.metric("scale_slope", slope);
            if critical {
                report.residuals.push(worst_spread / SCALING_DRIFT);
                report.note(format!("dilation spread/{SCALING_DRIFT} at r = p*"));
            } else {
                report.note(format!(
                    "r != p*: dilation probe informational, predicted exponent {exponent:.4}"
                ));
            }
            let battery = RatioBattery::run(family, held_out, grid, |f, g| {
                Ok((line_ratio(f, g.n(), 1.0)?, 1.0))
            })?;
            battery.record(&mut report);
            Ok(report.finish())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma_fn;

    fn spec(s: &str) -> FunctionSpec {
        FunctionSpec::parse(s).unwrap()
    }

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 1024).unwrap()
    }

    fn kernel_family() -> TestBattery {
        TestBattery::parse(&[
            "const:1",
            "pow:a=0;terms=1*1",
            "pow:a=0;terms=1*1.3",
            "pow:a=0;terms=1*2",
            "pow:a=0;terms=1*0.5",
            "kappa:alpha=0.3;side=left",
            "2*kappa:alpha=0.3;side=left + bump:c=0.6;r=0.2",
            "step:c=0.5;h=1",
            "bump:c=0.5;r=0.25",
            "bump:c=0.35;r=0.15",
            "gauss:mu=0.5;s=0.15",
        ])
        .unwrap()
    }

    fn regular_family() -> TestBattery {
        TestBattery::parse(&[
            "const:1",
            "pow:a=0;terms=1*1",
            "pow:a=0;terms=1*1.3",
            "pow:a=0;terms=1*2",
            "pow:a=0;terms=1*0.5",
            "pow:a=0;terms=1*3",
            "bump:c=0.5;r=0.25",
            "bump:c=0.35;r=0.15",
            "bump:c=0.7;r=0.2",
            "gauss:mu=0.5;s=0.15",
        ])
        .unwrap()
    }

    #[test]
    fn poincare_kernel_subtracted() {
        let held = spec("pow:a=0;terms=1*2,-1*3");
        let r = check_poincare(&kernel_family(), &held, 0.3, 2.0, Side::Left, PoincareVariant::KernelSubtracted, grid()).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!(r.metrics["drift"] <= STABILITY_DRIFT);
        // ‖1‖_2 / ‖D^{0.3} 1‖_2 = Γ(0.7) (1 - 0.6)^{1/2}
        let exact = gamma_fn(0.7).unwrap() * 0.4f64.sqrt();
        assert!((r.ratios[0] / exact - 1.0).abs() < 1e-3, "{} vs {exact}", r.ratios[0]);
        // the kernel annihilates both sides
        assert_eq!(r.ratios[5], 0.0);
    }

    #[test]
    fn poincare_regular_variants() {
        let held = spec("pow:a=0;terms=1*2,-1*3");
        for side in [Side::Left, Side::Right] {
            for v in [PoincareVariant::Mathring, PoincareVariant::Symmetric] {
                let r = check_poincare(&regular_family(), &held, 0.5, 1.5, side, v, grid()).unwrap();
                assert!(r.passed, "{side} {v:?}: {}", r.summary());
            }
        }
    }

    #[test]
    fn poincare_guards() {
        let held = spec("pow:a=0;terms=1*2");
        let r = check_poincare(&kernel_family(), &held, 0.3, 2.0, Side::Left, PoincareVariant::Mathring, grid());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
        let r = check_poincare(&kernel_family(), &held, 0.3, 2.0, Side::Left, PoincareVariant::Symmetric, grid());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
        // D^{0.6} 1 is not in L^2
        let r = check_poincare(&regular_family(), &held, 0.6, 2.0, Side::Left, PoincareVariant::Mathring, grid());
        assert!(matches!(r, Err(Error::Hypothesis(_))));
        let small = TestBattery::parse(&["const:1", "pow:a=0;terms=1*1"]).unwrap();
        assert!(check_poincare(&small, &held, 0.3, 2.0, Side::Left, PoincareVariant::KernelSubtracted, grid()).is_err());
    }

    #[test]
    fn sobolev_scaling_probe() {
        let family = TestBattery::line_default();
        let held = spec("gauss:mu=0.2;s=0.9");
        let domain = SobolevDomain::Line { half_width: 16.0, n: 8192 };
        let r = check_sobolev_inequality(&family, &held, 0.5, 1.5, 6.0, Side::Left, domain).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!(r.metrics["scale_spread"] <= SCALING_DRIFT);
        assert!(r.metrics["scale_slope"].abs() < 0.01);

        let r = check_sobolev_inequality(&family, &held, 0.5, 1.5, 4.2, Side::Left, domain).unwrap();
        assert_eq!(r.metrics["scale_monotone"], 1.0);
        assert!(r.metrics["scale_spread"] > SCALING_DRIFT);
        // ratio ~ λ^{1/p* - 1/r}
        let predicted = 1.0 / 6.0 - 1.0 / 4.2;
        assert!((r.metrics["scale_slope"] - predicted).abs() < 0.01, "{}", r.metrics["scale_slope"]);
    }

    #[test]
    fn sobolev_on_interval() {
        let held = spec("pow:a=0;terms=1*2,-1*3");
        let g = grid();
        let r = check_sobolev_inequality(&kernel_family(), &held, 0.3, 2.0, 5.0, Side::Left, SobolevDomain::Interval(g)).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.ratios[5], 0.0);
        let r = check_sobolev_inequality(&kernel_family(), &held, 0.3, 2.0, 5.5, Side::Left, SobolevDomain::Interval(g));
        assert!(matches!(r, Err(Error::Hypothesis(_))));
        let r = check_sobolev_inequality(&kernel_family(), &held, 0.5, 2.0, 2.0, Side::Left, SobolevDomain::Interval(g));
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }
}
