use super::check_exponent;
use crate::error::Result;
use crate::numerics::quad::{integrate_values, Integral};
use crate::numerics::{LineFunction, SampledFunction};

/// `‖u‖_p` with the integral split as in [`Integral`]; `p = inf` gives the
/// nodal maximum.
pub fn lp_norm_detailed(u: &SampledFunction, p: f64) -> Result<Integral> {
    check_exponent(p)?;
    if p.is_infinite() {
        let m = u.max_abs();
        let divergent = u.singular().any();
        return Ok(Integral {
            value: if divergent { f64::INFINITY } else { m },
            truncated: m,
            divergent,
        });
    }
    let pow: Vec<f64> = u.values().iter().map(|v| v.abs().powf(p)).collect();
    let r = integrate_values(&pow, u.grid().h(), u.singular());
    Ok(Integral {
        value: r.value.powf(1.0 / p),
        truncated: r.truncated.max(0.0).powf(1.0 / p),
        divergent: r.divergent,
    })
}

/// Trapezoidal `L^p` norm of the interpolant.
///
/// Cells next to a flagged endpoint are integrated with the power law fitted
/// to the neighbouring nodes (`+inf` when that power is not integrable);
/// with `exclude_singular` those cells are dropped instead.
pub fn lp_norm(u: &SampledFunction, p: f64, exclude_singular: bool) -> Result<f64> {
    let r = lp_norm_detailed(u, p)?;
    Ok(if exclude_singular { r.truncated } else { r.value })
}

pub fn lp_norm_line(u: &LineFunction, p: f64) -> Result<f64> {
    lp_norm(&u.as_sampled(), p, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn constants_and_linears() {
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let one = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        assert!((lp_norm(&one, 2.0, false).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(lp_norm(&one, f64::INFINITY, false).unwrap(), 1.0);
        let x = SampledFunction::from_fn(g, |x| x).unwrap();
        assert!((lp_norm(&x, 2.0, false).unwrap() - 0.5773502691896258).abs() < 1e-6);
    }

    #[test]
    fn rejects_small_exponent() {
        let g = uniform_grid(0.0, 1.0, 8).unwrap();
        assert!(lp_norm(&SampledFunction::zeros(g), 0.5, false).is_err());
    }

    #[test]
    fn singular_endpoint() {
        // ‖x^{-1/4}‖_2 = √2 on (0,1); ‖x^{-1/2}‖_2 = ∞
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.25)).unwrap();
        assert!((lp_norm(&u, 2.0, false).unwrap() - 2f64.sqrt()).abs() < 1e-4);
        assert!(lp_norm(&u, 2.0, true).unwrap() < 2f64.sqrt());
        assert_eq!(lp_norm(&u, f64::INFINITY, false).unwrap(), f64::INFINITY);
        let v = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap();
        assert_eq!(lp_norm(&v, 2.0, false).unwrap(), f64::INFINITY);
    }
}
