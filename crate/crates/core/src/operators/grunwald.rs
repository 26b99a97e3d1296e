use super::{by_side, check_order};
use crate::error::{Error, Result};
use crate::numerics::{gl_weights, LineFunction, SampledFunction, Side, Singular};
use crate::par::map_range;

fn left_sums(values: &[f64], alpha: f64, h: f64) -> Vec<f64> {
    let w = gl_weights(alpha, values.len() - 1);
    let k = h.powf(-alpha);
    map_range(values.len(), |j| {
        let mut s = 0.0;
        for (i, wi) in w.iter().enumerate().take(j + 1) {
            s += wi * values[j - i];
        }
        k * s
    })
}

/// Grünwald-Letnikov derivative `h^{-α} Σ_k w_k u(x - k h)`, the data
/// extended by zero beyond the base point. The base node is flagged.
pub fn gl_derivative(u: &SampledFunction, alpha: f64, side: Side) -> Result<SampledFunction> {
    check_order(alpha, 0.0, 1.0, true)?;
    if u.singular().any() {
        return Err(Error::unsupported(
            "Grünwald-Letnikov sums need finite values at every node",
        ));
    }
    by_side(u, side, |v| {
        let values = left_sums(v.values(), alpha, v.grid().h());
        SampledFunction::with_singular(
            *v.grid(),
            values,
            Singular {
                left: true,
                right: false,
            },
        )
    })
}

/// Grünwald-Letnikov derivative of a function on the line.
pub fn gl_derivative_line(u: &LineFunction, alpha: f64, side: Side) -> Result<LineFunction> {
    check_order(alpha, 0.0, 1.0, true)?;
    let src = match side {
        Side::Left => u.clone(),
        Side::Right => u.reflect(),
    };
    let out = LineFunction::new(
        src.half_width(),
        left_sums(src.values(), alpha, src.grid().h()),
    )?;
    Ok(match side {
        Side::Left => out,
        Side::Right => out.reflect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn zero_maps_to_zero() {
        let g = uniform_grid(0.0, 1.0, 32).unwrap();
        let d = gl_derivative(&SampledFunction::zeros(g), 0.5, Side::Left).unwrap();
        assert!(d.values()[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_order_is_backward_difference() {
        let g = uniform_grid(0.0, 1.0, 10).unwrap();
        let u = SampledFunction::from_fn(g, |x| x * x).unwrap();
        let d = gl_derivative(&u, 1.0, Side::Left).unwrap();
        for j in 1..=10 {
            let want = (u.value(j) - u.value(j - 1)) / g.h();
            assert!((d.value(j) - want).abs() < 1e-12);
        }
    }
}
