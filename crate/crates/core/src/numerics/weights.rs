use super::gamma::gamma;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Grünwald-Letnikov weights `w_k = (-1)^k C(α, k)`, `k = 0..=k_max`.
pub fn gl_weights(alpha: f64, k_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(k_max + 1);
    w.push(1.0);
    for k in 1..=k_max {
        let prev = w[k - 1];
        w.push(prev * ((k as f64 - 1.0 - alpha) / k as f64));
    }
    w
}

// Above this index the power differences below are summed as binomial
// series in 1/m; the direct formulas lose digits to cancellation.
const SERIES_FROM: usize = 16;

/// `Σ C(β, k) u^k` over `k = start, start + step, ...`.
fn binomial_tail(beta: f64, u: f64, start: usize, step: usize) -> f64 {
    let mut c = 1.0;
    let mut upow = 1.0;
    let mut sum = 0.0;
    for k in 1..=400 {
        c *= (beta - (k as f64 - 1.0)) / k as f64;
        upow *= u;
        if k >= start && (k - start).is_multiple_of(step) {
            let term = c * upow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
    }
    sum
}

/// `(m+1)^β - 2 m^β + (m-1)^β` for `m >= 1`.
fn second_difference(beta: f64, m: usize) -> f64 {
    let mf = m as f64;
    if m < SERIES_FROM {
        (mf + 1.0).powf(beta) - 2.0 * mf.powf(beta) + (mf - 1.0).powf(beta)
    } else {
        2.0 * mf.powf(beta) * binomial_tail(beta, 1.0 / mf, 2, 2)
    }
}

/// `(j-1)^β - (j-1-α) j^α` with `β = α + 1`, for `j >= 1`.
fn first_cell(alpha: f64, j: usize) -> f64 {
    let beta = alpha + 1.0;
    let jf = j as f64;
    if j < SERIES_FROM {
        (jf - 1.0).powf(beta) - (jf - 1.0 - alpha) * jf.powf(alpha)
    } else {
        // j^α [ j((1 - 1/j)^β - 1) + β ] = j^α Σ_{k>=2} C(β,k) (-1)^k j^{1-k}
        jf.powf(alpha) * jf * binomial_tail(beta, -1.0 / jf, 2, 1)
    }
}

/// L1 weights `b_m = (m+1)^{1-α} - m^{1-α}`, `m = 0..=n`.
pub fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let g = 1.0 - alpha;
    (0..=n)
        .map(|m| {
            let mf = m as f64;
            if m < SERIES_FROM {
                (mf + 1.0).powf(g) - mf.powf(g)
            } else {
                mf.powf(g) * binomial_tail(g, 1.0 / mf, 1, 1)
            }
        })
        .collect()
}

/// Unscaled product-trapezoid coefficients for the left integral of order
/// `α` on a grid with `n` cells.
///
/// For target node `j`, the weight of node `i` is `scale * c` with
/// `c = first[j]` for `i = 0`, `c = interior[j - i]` for `0 < i < j` and
/// `c = 1` for `i = j`.
#[derive(Debug, Clone)]
pub struct ProductTrapezoid {
    pub scale: f64,
    pub first: Vec<f64>,
    pub interior: Vec<f64>,
}

/// Coefficients for all targets on `grid`.
pub fn product_trapezoid_coeffs(alpha: f64, grid: &Grid) -> ProductTrapezoid {
    let n = grid.n();
    let beta = alpha + 1.0;
    let scale = grid.h().powf(alpha) / gamma(alpha + 2.0);
    let mut first = vec![0.0; n + 1];
    let mut interior = vec![0.0; n + 1];
    for m in 1..=n {
        first[m] = first_cell(alpha, m);
        interior[m] = second_difference(beta, m);
    }
    ProductTrapezoid {
        scale,
        first,
        interior,
    }
}

/// Weights `W_0..W_j` with `Σ W_i f(x_i) = I^α f(x_j)` exactly for every
/// piecewise-linear `f` on the grid (left integral from `a`).
pub fn singular_quadrature_weights(alpha: f64, grid: &Grid, j: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("order must be positive, got {alpha}")));
    }
    if j == 0 || j > grid.n() {
        return Err(Error::domain(format!("target index {j} outside 1..={}", grid.n())));
    }
    let beta = alpha + 1.0;
    let scale = grid.h().powf(alpha) / gamma(alpha + 2.0);
    let mut w = Vec::with_capacity(j + 1);
    w.push(scale * first_cell(alpha, j));
    for i in 1..j {
        w.push(scale * second_difference(beta, j - i));
    }
    w.push(scale);
    Ok(w)
}
