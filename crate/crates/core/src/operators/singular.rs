//! Separation of a power-law singularity at the base endpoint.

use crate::error::{Error, Result};
use crate::numerics::SampledFunction;

/// `coeff · (x - a)^exponent`, the leading behaviour at a flagged base node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerLead {
    pub coeff: f64,
    pub exponent: f64,
}

/// Exponents closer than this to a critical value are snapped to it.
pub(crate) const SNAP: f64 = 1e-10;

pub(crate) fn snap(e: f64, target: f64) -> f64 {
    if (e - target).abs() < SNAP {
        target
    } else {
        e
    }
}

/// Solves the small dense system `m x = rhs` by Gaussian elimination with
/// partial pivoting.
pub(crate) fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..k {
                m[row][c] -= f * m[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    Some(x)
}

/// Exponent `g < 0` of the model `A x^g + B + C x` through samples at
/// distances `1..=4` (in cells), or `None` when the data do not blow up
/// like a power.
///
/// Second differences remove `B + C x`; their ratio decreases in `g`.
pub(crate) fn singular_exponent(v: [f64; 4]) -> Option<f64> {
    let d1 = v[0] - 2.0 * v[1] + v[2];
    let d2 = v[1] - 2.0 * v[2] + v[3];
    if d2 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let target = d1 / d2;
    let ratio = |g: f64| {
        let p = |j: f64| j.powf(g);
        (1.0 - 2.0 * p(2.0) + p(3.0)) / (p(2.0) - 2.0 * p(3.0) + p(4.0))
    };
    let (mut lo, mut hi) = (-4.0, -1e-6);
    if target >= ratio(lo) {
        return Some(lo);
    }
    if target <= ratio(hi) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Coefficient `A` of `A j^e + B + C j` through samples at `j = 1, 2, 3`
/// (distances in cells).
pub(crate) fn kernel_coefficient(e: f64, v: [f64; 3]) -> Option<f64> {
    let t = |j: f64| j.powf(e);
    solve((1..=3).map(|j| vec![t(j as f64), 1.0, j as f64]).collect(), v.to_vec()).map(|x| x[0])
}

/// Left-oriented data: leading power at `a` (if the base node is flagged and
/// the samples show one) and the remainder, finite at every node the
/// left-sided operators read before the far end.
pub(crate) struct Split {
    pub lead: Option<PowerLead>,
    pub rest: Vec<f64>,
    pub far_flagged: bool,
}

/// Fitted exponents this close to the kernel exponent are read as the kernel.
pub(crate) const KERNEL_MATCH: f64 = 1e-3;

/// `kernel`: exponent that a fitted blow-up within [`KERNEL_MATCH`] is
/// snapped to (`α - 1` for the derivative of order `α`).
pub(crate) fn split_left(u: &SampledFunction, kernel: Option<f64>) -> Result<Split> {
    let n = u.grid().n();
    let h = u.grid().h();
    let mut rest = u.values().to_vec();
    let far_flagged = u.singular().right;
    if !u.singular().left {
        return Ok(Split {
            lead: None,
            rest,
            far_flagged,
        });
    }
    if n < 3 || (far_flagged && n < 4) {
        return Err(Error::domain("too few nodes to resolve an endpoint singularity"));
    }
    let (v1, v2) = (rest[1], rest[2]);
    let scale = u.max_abs();
    let tiny = 1e-12 * scale;
    let mut lead = None;
    // a blow-up on top of a smooth part: A x^g + B + C x from four nodes
    let fitted = if far_flagged && n < 5 {
        None
    } else {
        singular_exponent([v1, v2, rest[3], rest[4]])
    };
    let two_point = (v1 / v2 > 0.0).then(|| (v2 / v1).ln() / std::f64::consts::LN_2);
    // a pure power is split exactly by the two-point exponent below
    let pure = |g: f64| two_point.is_some_and(|t| (t - g).abs() < 1e-6);
    // data that do not grow towards the end carry no blow-up to remove
    let grows = v1.abs() > v2.abs();
    if let Some(g) = fitted.filter(|&g| g > -4.0 && grows && !pure(g)) {
        let g = match kernel {
            Some(k) if (g - k).abs() < KERNEL_MATCH => k,
            _ => g,
        };
        if g <= -1.0 {
            return Err(Error::domain(format!(
                "endpoint singularity with exponent {g:.3} is not integrable"
            )));
        }
        let a = kernel_coefficient(g, [v1, v2, rest[3]]).filter(|a| a.is_finite());
        if let Some(a) = a {
            let coeff = a / h.powf(g);
            let last = if far_flagged { n - 1 } else { n };
            for (j, r) in rest.iter_mut().enumerate().take(last + 1).skip(1) {
                *r -= coeff * (j as f64 * h).powf(g);
            }
            rest[0] = 2.0 * rest[1] - rest[2];
            return Ok(Split {
                lead: Some(PowerLead { coeff, exponent: g }),
                rest,
                far_flagged,
            });
        }
    }
    if v1.abs() > tiny && v2.abs() > tiny && v1.signum() == v2.signum() {
        let gamma = (v2 / v1).ln() / std::f64::consts::LN_2;
        if gamma <= -1.0 {
            return Err(Error::domain(format!(
                "endpoint singularity with exponent {gamma:.3} is not integrable"
            )));
        }
        if gamma < 1.0 {
            let coeff = v1 / h.powf(gamma);
            let last = if far_flagged { n - 1 } else { n };
            for (j, r) in rest.iter_mut().enumerate().take(last + 1).skip(1) {
                *r -= coeff * (j as f64 * h).powf(gamma);
            }
            lead = Some(PowerLead {
                coeff,
                exponent: gamma,
            });
        }
    }
    rest[0] = 2.0 * rest[1] - rest[2];
    Ok(Split {
        lead,
        rest,
        far_flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system_solver() {
        let x = solve(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
