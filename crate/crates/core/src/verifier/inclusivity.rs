use super::pairing::base_point;
use super::report::{interior_rel_linf, resolve, sample, ReportInputs, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, Grid, SampledFunction, Side};
use crate::oracle::{oracle_frac_derivative, DerivativeKind, FunctionSpec};
use crate::operators::{frac_integral, rl_derivative};
use crate::spaces::{lp_norm, sobolev_norm, NormFamily, NormSpec};

/// Tolerance of the reconstruction on interior nodes.
pub const INCLUSIVITY_TOL: f64 = 1e-2;

/// Order-`α` derivative rebuilt from order-`β` data, `α < β`:
///
/// `D^α u = Γ(β)/Γ(β-α) (u - I^β D^β u) |x-a|^{-α} + I^{β-α} D^β u`.
///
/// The first term is `c κ^{β-α}` written through `u - I^β D^β u = c κ^β`.
/// Residual: interior rel L∞ against the L1 derivative of order `α`, and
/// against the oracle when it has one. Ratio: `‖D^α u‖_p / ‖u‖_{W^{β,p}}`.
pub fn check_inclusivity(
    u: &FunctionSpec,
    alpha: f64,
    beta: f64,
    p: f64,
    side: Side,
    grid: Grid,
) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(Error::domain(format!("need 0 < alpha < beta < 1, got alpha = {alpha}, beta = {beta}")));
    }
    let us = sample(u, &grid)?;
    let big = sobolev_norm(&us, &NormSpec::new(NormFamily::one_sided(side), beta, p)?)?.value;
    if !big.is_finite() {
        return Err(Error::hypothesis(format!("{u} is outside the order-{beta} space")));
    }
    let db = rl_derivative(&us, beta, side)?;
    let kernel_part = us.sub(&frac_integral(&db, beta, side)?)?;
    let tail = frac_integral(&db, beta - alpha, side)?;
    let base = base_point(&grid, side);
    let g = gamma_fn(beta)? / gamma_fn(beta - alpha)?;
    let lifted: Vec<f64> = (0..=grid.n())
        .map(|j| {
            let d = (grid.node(j) - base).abs();
            // the base node is never compared
            if d == 0.0 {
                0.0
            } else {
                g * kernel_part.value(j) * d.powf(-alpha)
            }
        })
        .collect();
    let rebuilt = SampledFunction::new(grid, lifted)?.add(&tail)?;
    let direct = rl_derivative(&us, alpha, side)?;

    let inputs = ReportInputs::new(vec![u.to_string()], alpha).on(&grid).with_p(p).with_side(side);
    let mut report = VerificationReport::new("inclusivity", ReportInputs { beta: Some(beta), ..inputs }, INCLUSIVITY_TOL);
    report.residuals.push(interior_rel_linf(&rebuilt, &direct));
    let oracle = oracle_frac_derivative(&resolve(u, &grid), alpha, side, base, DerivativeKind::RiemannLiouville)
        .and_then(|d| d.sample(grid));
    if let Ok(exact) = oracle {
        let gap = interior_rel_linf(&rebuilt, &exact);
        report.residuals.push(gap);
        report.metric("oracle_gap", gap);
    }
    let small = lp_norm(&direct, p, false)?;
    report.ratios.push(if big == 0.0 { 0.0 } else { small / big });
    report.metric("beta_norm", big);
    report.metric("alpha_derivative_norm", small);
    report.metric("direct_gap", interior_rel_linf(&rebuilt, &direct));
    report.note("residuals = interior rel L∞ of the two-term form against D^α u (and the oracle); ratio = ‖D^α u‖_p / ‖u‖_{W^{β,p}}");
    Ok(report.finish())
}
