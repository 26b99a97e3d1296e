use serde::{Deserialize, Serialize};

use super::report::{interior_rel_linf, relative_gap, resolve, sample, ReportInputs, TestBattery, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::quad::integrate;
use crate::numerics::{Grid, SampledFunction, Side};
use crate::operators::{endpoint_constant, frac_integral, kappa, rl_derivative};
use crate::oracle::{oracle_frac_derivative, DerivativeKind, FunctionSpec};

/// Source of the candidate weak derivative in [`check_weak_pairing`].
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    /// Closed-form derivative of `u`.
    Oracle,
    /// `rl_derivative` of the samples of `u`.
    Numerical,
    Spec(FunctionSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IbpVariant {
    Symmetric,
    OneSidedZeroTrace,
}

impl IbpVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            IbpVariant::Symmetric => "symmetric",
            IbpVariant::OneSidedZeroTrace => "one_sided_zero_trace",
        }
    }
}

fn sign(alpha: f64) -> f64 {
    if (alpha.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn base_point(grid: &Grid, side: Side) -> f64 {
    match side {
        Side::Left => grid.a(),
        Side::Right => grid.b(),
    }
}

/// `∫ u v` and `∫ |u v|` with singular end cells handled by power laws.
pub(crate) fn pair(u: &SampledFunction, v: &SampledFunction) -> Result<(f64, f64)> {
    let prod = u.mul(v)?;
    let abs = prod.map(f64::abs)?;
    Ok((integrate(&prod).value, integrate(&abs).value))
}

/// Derivative of the zero extension of `phi`, computed on a grid three
/// times as wide with the same spacing and restricted back to `grid`.
fn extended_derivative(phi: &FunctionSpec, grid: &Grid, alpha: f64, side: Side) -> Result<SampledFunction> {
    let w = grid.width();
    let n = grid.n();
    let ambient = Grid::new(grid.a() - w, grid.b() + w, 3 * n)?;
    let f = resolve(phi, grid);
    let wide = SampledFunction::from_fn(ambient, |x| {
        if x <= grid.a() || x >= grid.b() {
            0.0
        } else {
            f.eval(x)
        }
    })?;
    let d = rl_derivative(&wide, alpha, side)?;
    SampledFunction::new(*grid, d.values()[n..=2 * n].to_vec())
}

/// Weak derivative test: `∫ v φ = (-1)^m ∫ u D^α φ̃` for every bump `φ`,
/// with `D` of the opposite side and `φ̃` the zero extension.
pub fn check_weak_pairing(
    u: &FunctionSpec,
    v: &Candidate,
    alpha: f64,
    side: Side,
    battery: &TestBattery,
    grid: Grid,
) -> Result<VerificationReport> {
    if battery.is_empty() {
        return Err(Error::domain("empty test battery"));
    }
    for phi in &battery.members {
        if !resolve(phi, &grid).compactly_supported_in(grid.a(), grid.b()) {
            return Err(Error::Support(format!("{phi} is not compactly supported in the interval")));
        }
    }
    let us = sample(u, &grid)?;
    let (vs, v_label) = match v {
        Candidate::Oracle => {
            let d = oracle_frac_derivative(
                &resolve(u, &grid),
                alpha,
                side,
                base_point(&grid, side),
                DerivativeKind::RiemannLiouville,
            )?;
            (d.sample(grid)?, "oracle".to_string())
        }
        Candidate::Numerical => (rl_derivative(&us, alpha, side)?, "numerical".to_string()),
        Candidate::Spec(s) => (sample(s, &grid)?, s.to_string()),
    };
    let mut functions = vec![u.to_string(), v_label];
    functions.extend(battery.labels());
    let inputs = ReportInputs::new(functions, alpha).on(&grid).with_side(side);
    let mut report = VerificationReport::new("weak_pairing", inputs, 1e-3);
    let s = sign(alpha);
    for phi in &battery.members {
        let phis = sample(phi, &grid)?;
        let dphi = extended_derivative(phi, &grid, alpha, side.opposite())?;
        let (lhs, lhs_abs) = pair(&vs, &phis)?;
        let (rhs, rhs_abs) = pair(&us, &dphi)?;
        let rhs = s * rhs;
        report.residuals.push(relative_gap(lhs, rhs, lhs_abs + rhs_abs));
        report.ratios.push(if rhs == 0.0 && lhs == 0.0 { 1.0 } else { lhs / rhs });
    }
    report.note("residual = |∫vφ - (-1)^m ∫u D^α φ̃| / (∫|vφ| + ∫|u D^α φ̃|)");
    Ok(report.finish())
}

/// Kernel decomposition `u = c κ^α + I^α D^α u` on the middle 80% of
/// nodes, with `c` from [`endpoint_constant`].
pub fn check_ftwfc(u: &FunctionSpec, alpha: f64, side: Side, grid: Grid) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let us = sample(u, &grid)?;
    let d = rl_derivative(&us, alpha, side)?;
    let back = frac_integral(&d, alpha, side)?;
    let c = endpoint_constant(&us, alpha, side)?;
    let k = kappa(alpha, side, grid)?;
    let recon = k.scale(c.c_value).add(&back)?;
    let inputs = ReportInputs::new(vec![u.to_string()], alpha).on(&grid).with_side(side);
    let mut report = VerificationReport::new("ftwfc", inputs, 1e-2);
    report.residuals.push(interior_rel_linf(&recon, &us));
    let peak = |f: &SampledFunction| super::report::interior(&grid).fold(0.0f64, |m, j| m.max(f.value(j).abs()));
    let pu = peak(&us);
    report.ratios.push(if pu == 0.0 { 1.0 } else { peak(&recon) / pu });
    report.metric("recovered_c", c.c_value);
    report.metric("c_spread", c.residual_estimate);
    report.note("residual = interior max |u - c κ - I D u| / max |u|");
    Ok(report.finish())
}

/// Fractional integration by parts.
///
/// Symmetric variant: `∫ u D_+ v = ∫ v D_- u` and the mirrored identity,
/// for `u`, `v` continuous up to the boundary with `αp > 1`, `αq > 1`.
/// One-sided variant: `∫ v D_± u = ∫ u D_∓ v` for compactly supported `v`.
pub fn check_ibp(
    u: &FunctionSpec,
    v: &FunctionSpec,
    alpha: f64,
    p: f64,
    q: f64,
    variant: IbpVariant,
    grid: Grid,
) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let (a, b) = (grid.a(), grid.b());
    match variant {
        IbpVariant::Symmetric => {
            if alpha * p <= 1.0 || alpha * q <= 1.0 {
                return Err(Error::hypothesis(format!(
                    "symmetric integration by parts needs alpha*p > 1 and alpha*q > 1 (got {}, {})",
                    alpha * p,
                    alpha * q
                )));
            }
            for f in [u, v] {
                if !resolve(f, &grid).continuous_on(a, b) {
                    return Err(Error::hypothesis(format!("{f} is not continuous up to the boundary")));
                }
            }
        }
        IbpVariant::OneSidedZeroTrace => {
            if !resolve(v, &grid).compactly_supported_in(a, b) {
                return Err(Error::hypothesis(format!("{v} is not compactly supported in the interval")));
            }
        }
    }
    let us = sample(u, &grid)?;
    let vs = sample(v, &grid)?;
    let mut inputs = ReportInputs::new(vec![u.to_string(), v.to_string()], alpha)
        .on(&grid)
        .with_p(p)
        .with_variant(variant.as_str());
    inputs.q = Some(q);
    let mut report = VerificationReport::new("ibp", inputs, 1e-3);
    let s = sign(alpha);
    for side in [Side::Left, Side::Right] {
        // ∫ v D_side u  vs  ∫ u D_opposite v
        let du = rl_derivative(&us, alpha, side)?;
        let dv = rl_derivative(&vs, alpha, side.opposite())?;
        let (lhs, lhs_abs) = pair(&vs, &du)?;
        let (rhs, rhs_abs) = pair(&us, &dv)?;
        let rhs = s * rhs;
        report.residuals.push(relative_gap(lhs, rhs, lhs_abs + rhs_abs));
        report.ratios.push(if lhs == 0.0 && rhs == 0.0 { 1.0 } else { lhs / rhs });
    }
    report.note("residual = |∫v D_± u - (-1)^m ∫u D_∓ v| / (∫|v D_± u| + ∫|u D_∓ v|), both sides");
    Ok(report.finish())
}
