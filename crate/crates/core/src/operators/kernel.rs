use serde::{Deserialize, Serialize};

use super::check_order;
use super::singular::{kernel_coefficient, singular_exponent, KERNEL_MATCH};
use crate::error::{Error, Result};
use crate::numerics::{FracOrder, Grid, SampledFunction, Side};
use crate::oracle::ClosedForm;

/// Samples of `(x - a)^{α-1}` (left) or `(b - x)^{α-1}` (right); the
/// singular endpoint node is flagged.
pub fn kappa(alpha: f64, side: Side, grid: Grid) -> Result<SampledFunction> {
    check_order(alpha, 0.0, 1.0, true)?;
    ClosedForm::kappa(alpha, side, grid.a(), grid.b()).sample(grid)
}

/// Coefficient of the kernel in `u = c κ^α + I^α 𝒟^α u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstant {
    pub c_value: f64,
    pub side: Side,
    pub alpha: FracOrder,
    /// Number of terms in the extrapolation fit; 0 when the base node is finite.
    pub extrapolation_order: usize,
    /// Difference between the two highest extrapolation fits.
    pub residual_estimate: f64,
}

/// Endpoint constant `c = (I^{1-α} u)(a+) / Γ(α)` (left).
///
/// A bounded interpolant has `|I^{1-α} u| <= ‖u‖_∞ x^{1-α} / Γ(2-α)`, so
/// only the singular part at a flagged base node contributes: `c` is the
/// coefficient `A` in `u ≈ A κ^α + bounded`. The exponent is fitted from
/// the four nearest nodes; `A` comes from the fit `A x^{α-1} + B + C x`,
/// with the two-term fit `A x^{α-1} + B` as the spread estimate.
pub fn endpoint_constant(u: &SampledFunction, alpha: f64, side: Side) -> Result<KernelConstant> {
    check_order(alpha, 0.0, 1.0, false)?;
    let src = match side {
        Side::Left => u.clone(),
        Side::Right => u.reflect(),
    };
    let done = |c_value: f64, extrapolation_order: usize, residual_estimate: f64| {
        Ok(KernelConstant {
            c_value,
            side,
            alpha: FracOrder::new(alpha)?,
            extrapolation_order,
            residual_estimate,
        })
    };
    if !src.singular().left {
        return done(0.0, 0, 0.0);
    }
    if src.grid().n() < 6 {
        return Err(Error::domain("need at least 6 cells to resolve the endpoint"));
    }
    let (v1, v2, v3) = (src.value(1), src.value(2), src.value(3));
    let e = alpha - 1.0;
    let Some(g) = singular_exponent([v1, v2, v3, src.value(4)]) else {
        // no power-law blow-up: the flagged node holds a bounded function
        return done(0.0, 0, 0.0);
    };
    if g > e + KERNEL_MATCH {
        // weaker than the kernel: I^{1-α} u -> 0
        return done(0.0, 0, 0.0);
    }
    if g < e - KERNEL_MATCH {
        return Err(Error::domain(format!(
            "endpoint singularity x^{g:.3} is stronger than the kernel: constant is infinite"
        )));
    }
    let h = src.grid().h();
    let t = |j: f64| j.powf(e);
    let two = (v1 - v2) / (t(1.0) - t(2.0));
    let three = kernel_coefficient(e, [v1, v2, v3]);
    let Some(three) = three else {
        return Err(Error::Extrapolation {
            value: f64::NAN,
            spread: f64::INFINITY,
        });
    };
    let scale = h.powf(e);
    let c = three / scale;
    let spread = (three - two).abs() / scale;
    if !c.is_finite() || spread > 1e-2 * c.abs() {
        return Err(Error::Extrapolation { value: c, spread });
    }
    done(c, 3, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn kernel_values() {
        let g = uniform_grid(0.0, 1.0, 8).unwrap();
        let k = kappa(0.5, Side::Left, g).unwrap();
        assert_eq!(k.value(2), 2.0);
        assert!(k.is_flagged(0));
        let r = kappa(0.5, Side::Right, g).unwrap();
        assert_eq!(r.value(6), 2.0);
        let one = kappa(1.0, Side::Left, g).unwrap();
        assert!(one.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn constant_of_kernel_is_one() {
        let g = uniform_grid(0.0, 1.0, 512).unwrap();
        for side in [Side::Left, Side::Right] {
            let c = endpoint_constant(&kappa(0.4, side, g).unwrap(), 0.4, side).unwrap();
            assert!((c.c_value - 1.0).abs() < 1e-10, "{side}: {}", c.c_value);
        }
    }

    #[test]
    fn smooth_functions_have_no_constant() {
        let g = uniform_grid(0.0, 1.0, 512).unwrap();
        let u = SampledFunction::from_fn(g, |x| 1.0 + x.sin()).unwrap();
        let c = endpoint_constant(&u, 0.5, Side::Left).unwrap();
        assert!(c.c_value.abs() < 1e-6, "{}", c.c_value);
    }

    #[test]
    fn kernel_plus_smooth_away_from_one_half() {
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        for alpha in [0.2, 0.3, 0.7, 0.85] {
            let u = SampledFunction::from_fn(g, |x| 1.5 * x.powf(alpha - 1.0) + x + (2.0 * x).cos()).unwrap();
            let c = endpoint_constant(&u, alpha, Side::Left).unwrap();
            assert!((c.c_value - 1.5).abs() < 1.5e-2, "alpha {alpha}: {}", c.c_value);
            let r = endpoint_constant(&u.reflect(), alpha, Side::Right).unwrap();
            assert_eq!(r.c_value, c.c_value);
        }
    }

    #[test]
    fn rough_bounded_functions_have_no_constant() {
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.sqrt()).unwrap();
        assert_eq!(endpoint_constant(&u, 0.3, Side::Left).unwrap().c_value, 0.0);
    }
}
