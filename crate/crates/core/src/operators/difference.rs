use super::check_order;
use crate::error::{Error, Result};
use crate::numerics::{SampledFunction, Singular};

/// Second-order nodal first derivative on `values[lo..=hi]`.
fn first_derivative(values: &[f64], h: f64, lo: usize, hi: usize) -> Vec<f64> {
    let mut d = values.to_vec();
    if hi - lo < 2 {
        for j in lo..=hi {
            d[j] = (values[hi] - values[lo]) / ((hi - lo) as f64 * h);
        }
        return d;
    }
    d[lo] = (-3.0 * values[lo] + 4.0 * values[lo + 1] - values[lo + 2]) / (2.0 * h);
    for j in lo + 1..hi {
        d[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
    }
    d[hi] = (3.0 * values[hi] - 4.0 * values[hi - 1] + values[hi - 2]) / (2.0 * h);
    d
}

/// Nodal derivative of integer order `m` by repeated second-order
/// differences. Flagged nodes stay flagged and are not read.
pub fn integer_derivative(u: &SampledFunction, m: u32) -> Result<SampledFunction> {
    check_order(m as f64, -1.0, f64::INFINITY, false)?;
    let n = u.grid().n();
    let s: Singular = u.singular();
    let lo = usize::from(s.left);
    let hi = n - usize::from(s.right);
    if hi < lo + 2 {
        return Err(Error::domain("too few regular nodes to differentiate"));
    }
    let mut values = u.values().to_vec();
    for _ in 0..m {
        values = first_derivative(&values, u.grid().h(), lo, hi);
    }
    SampledFunction::with_singular(*u.grid(), values, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;

    #[test]
    fn exact_on_quadratics() {
        let g = uniform_grid(0.0, 1.0, 16).unwrap();
        let u = SampledFunction::from_fn(g, |x| 3.0 * x * x - x).unwrap();
        let d = integer_derivative(&u, 1).unwrap();
        for (x, v) in g.nodes().iter().zip(d.values()) {
            assert!((v - (6.0 * x - 1.0)).abs() < 1e-12);
        }
        assert_eq!(integer_derivative(&u, 0).unwrap(), u);
    }

    #[test]
    fn skips_flagged_nodes() {
        let g = uniform_grid(0.0, 1.0, 16).unwrap();
        let u = SampledFunction::from_fn(g, |x| x.powf(-0.5)).unwrap();
        let d = integer_derivative(&u, 1).unwrap();
        assert!(d.is_flagged(0));
        assert!(d.values()[1..].iter().all(|v| v.is_finite() && *v < 0.0));
    }
}
