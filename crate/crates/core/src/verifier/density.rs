use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::inequalities::kernel_split;
use super::report::{resolve, sample, ReportInputs, VerificationReport};
use crate::error::{Error, Result};
use crate::par;
use crate::numerics::quad::gauss_legendre;
use crate::numerics::{Grid, SampledFunction, Side};
use crate::oracle::{oracle_frac_integral, Atom, ClosedForm, FunctionSpec};
use crate::spaces::{sobolev_norm, NormFamily, NormSpec};

/// Levels `k` of the mollifier widths `(b - a) / 2^k`.
pub const MOLLIFIER_LEVELS: [u32; 5] = [3, 4, 5, 6, 7];
/// Cell counts of the piecewise-constant projections.
pub const CELL_COUNTS: [usize; 5] = [8, 16, 32, 64, 128];
/// Final mollification error allowed, relative to `‖u‖`.
pub const DENSITY_TOL: f64 = 1e-2;
/// Relative slack before a growing error counts as non-monotone.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Smooth,
    PiecewiseConstant,
}

impl DensityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DensityMode::Smooth => "smooth",
            DensityMode::PiecewiseConstant => "piecewise_constant",
        }
    }
}

/// Nodes and weights on `(-1, 1)` of the standard mollifier
/// `e^{-1/(1-z^2)}`, normalised so that the weights sum to one.
fn mollifier_rule() -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(8).expect("degree is at least 2");
    let panels = 8;
    let w = 2.0 / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for k in 0..panels {
        let lo = -1.0 + k as f64 * w;
        for &(x, wt) in rule.iter() {
            let z = lo + 0.5 * w * (x + 1.0);
            out.push((z, 0.5 * w * wt * (-1.0 / (1.0 - z * z)).exp()));
        }
    }
    let mass: f64 = out.iter().map(|p| p.1).sum();
    out.iter_mut().for_each(|p| p.1 /= mass);
    out
}

/// Mollification with a width that shrinks towards the boundary:
/// `ε(x) = ε tanh(d(x) / 2ε)` with `d(x) = (x-a)(b-x)/(b-a)`, so the
/// window around `x` never leaves the interval. `eval` gives the values
/// between nodes; the end nodes keep their samples.
fn mollify(r: &SampledFunction, eval: impl Fn(f64) -> f64 + Sync, eps: f64) -> Result<SampledFunction> {
    let g = *r.grid();
    let (a, b) = (g.a(), g.b());
    let rule = mollifier_rule();
    let values = par::map_range(g.n() + 1, |j| {
        let x = g.node(j);
        let d = (x - a) * (b - x) / (b - a);
        let e = eps * (d / (2.0 * eps)).tanh();
        if e == 0.0 {
            return r.value(j);
        }
        rule.iter().map(|&(z, w)| w * eval(x - e * z)).sum()
    });
    SampledFunction::with_singular(g, values, r.singular())
}

/// `∫_x0^x1 f` atom by atom: exact primitives where the oracle has them,
/// composite Gauss-Legendre for Gaussians and bumps.
fn cell_integral(f: &ClosedForm, x0: f64, x1: f64, a: f64, b: f64) -> f64 {
    f.atoms
        .iter()
        .map(|atom| {
            let one = ClosedForm::new(vec![atom.clone()]);
            if let Ok(big) = oracle_frac_integral(&one, 1.0, Side::Left, a) {
                big.eval(x1) - big.eval(x0)
            } else if let Ok(big) = oracle_frac_integral(&one, 1.0, Side::Right, b) {
                big.eval(x0) - big.eval(x1)
            } else {
                gauss_legendre(|x| one.eval(x), x0, x1, 16, 8)
            }
        })
        .sum()
}

/// Projection onto `cells` constants (exact cell means of `f`); shared
/// nodes take the mean of the two neighbouring cells, as a jump is sampled.
fn project(f: &ClosedForm, grid: &Grid, cells: usize) -> Result<SampledFunction> {
    let n = grid.n();
    if !n.is_multiple_of(cells) {
        return Err(Error::domain(format!("{n} cells do not split into {cells} equal parts")));
    }
    let m = n / cells;
    let means: Vec<f64> = (0..cells)
        .map(|k| {
            let (x0, x1) = (grid.node(k * m), grid.node((k + 1) * m));
            cell_integral(f, x0, x1, grid.a(), grid.b()) / (x1 - x0)
        })
        .collect();
    let values = (0..=n)
        .map(|j| {
            let k = j / m;
            if j % m != 0 {
                means[k]
            } else if j == 0 {
                means[0]
            } else if j == n {
                means[cells - 1]
            } else {
                0.5 * (means[k - 1] + means[k])
            }
        })
        .collect();
    SampledFunction::new(*grid, values)
}

/// Jumps or singularities strictly inside `(a, b)`.
fn interior_break(f: &ClosedForm, a: f64, b: f64) -> bool {
    f.atoms.iter().any(|atom| match atom {
        Atom::Step { at, height, .. } => *height != 0.0 && *at > a && *at < b,
        Atom::Power { anchor, terms, .. } => {
            *anchor > a && *anchor < b && terms.iter().any(|&(c, e)| c != 0.0 && e <= 0.0)
        }
        _ => false,
    })
}

/// Zeroes differences at rounding level, which the endpoint power fit
/// would otherwise read as a singularity.
fn flush(w: SampledFunction, scale: f64) -> Result<SampledFunction> {
    let tiny = 1e-13 * scale;
    w.map(|v| if v.abs() <= tiny { 0.0 } else { v })
}

/// Density probe: approximation errors `‖u - u_k‖_{W^{α,p}}` along a
/// sequence of approximants.
///
/// Smooth mode mollifies the remainder `u - c κ` (the kernel is smooth
/// inside the interval) at widths `(b-a)/2^k`, `k = 3..7`, and requires a
/// final error of at most `1e-2 ‖u‖`. Piecewise-constant mode projects onto
/// `8..128` cells and needs `αp < 1`. Both require errors that do not
/// grow. Ratios are the relative errors.
pub fn check_density(
    u: &FunctionSpec,
    alpha: f64,
    p: f64,
    side: Side,
    mode: DensityMode,
    grid: Grid,
) -> Result<VerificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if mode == DensityMode::PiecewiseConstant && alpha * p >= 1.0 {
        return Err(Error::hypothesis(format!(
            "piecewise constants are dense only for alpha*p < 1, got {}",
            alpha * p
        )));
    }
    let f = resolve(u, &grid);
    if alpha * p >= 1.0 && interior_break(&f, grid.a(), grid.b()) {
        return Err(Error::hypothesis(format!(
            "{u} jumps inside the interval, which needs alpha*p < 1 (got {})",
            alpha * p
        )));
    }
    let spec = NormSpec::new(NormFamily::one_sided(side), alpha, p)?;
    let us = sample(u, &grid)?;
    let norm = sobolev_norm(&us, &spec)?.value;
    if !norm.is_finite() {
        return Err(Error::hypothesis(format!("{u} is outside the space: its norm diverges")));
    }
    let errors: Vec<f64> = match mode {
        DensityMode::Smooth => {
            let (c, r) = kernel_split(&us, alpha, side)?;
            if r.singular().any() {
                return Err(Error::domain(format!("{u} is unbounded beyond its kernel part")));
            }
            let kernel = ClosedForm::kappa(alpha, side, grid.a(), grid.b());
            let exact = |x: f64| f.eval(x) - c * kernel.eval(x);
            MOLLIFIER_LEVELS
                .iter()
                .map(|&k| {
                    let eps = grid.width() / 2f64.powi(k as i32);
                    let w = flush(r.sub(&mollify(&r, exact, eps)?)?, r.max_abs())?;
                    Ok(sobolev_norm(&w, &spec)?.value)
                })
                .collect::<Result<_>>()?
        }
        DensityMode::PiecewiseConstant => CELL_COUNTS
            .iter()
            .map(|&c| {
                let w = flush(us.sub(&project(&f, &grid, c)?)?, us.max_abs())?;
                Ok(sobolev_norm(&w, &spec)?.value)
            })
            .collect::<Result<_>>()?,
    };
    let inputs = ReportInputs::new(vec![u.to_string()], alpha)
        .on(&grid)
        .with_p(p)
        .with_side(side)
        .with_variant(mode.as_str());
    let mut report = VerificationReport::new("density", inputs, 1.0);
    let rel = |e: f64| if norm == 0.0 { e } else { e / norm };
    for pair in errors.windows(2) {
        let grow = if pair[1] <= pair[0] * (1.0 + MONOTONE_SLACK) + 1e-14 * norm {
            0.0
        } else if pair[0] == 0.0 {
            f64::INFINITY
        } else {
            (pair[1] / pair[0] - 1.0) / MONOTONE_SLACK
        };
        report.residuals.push(grow);
    }
    let last = rel(*errors.last().expect("levels are non-empty"));
    if mode == DensityMode::Smooth {
        report.residuals.push(last / DENSITY_TOL);
    }
    report.ratios = errors.iter().map(|&e| rel(e)).collect();
    report.metric("norm", norm);
    report.metric("final_error", last);
    if errors[0] > 0.0 && last > 0.0 {
        // errors against width (smooth) or cell size (piecewise)
        report.metric("rate", (errors[0] / errors[errors.len() - 1]).log2() / (errors.len() - 1) as f64);
    }
    report.note("ratios = ‖u - u_k‖ / ‖u‖ along the sequence; residuals = growth between levels (over 1e-9) and, in smooth mode, final error over 1e-2");
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(0.0, 1.0, 2048).unwrap()
    }

    fn spec(s: &str) -> FunctionSpec {
        FunctionSpec::parse(s).unwrap()
    }

    #[test]
    fn mollifier_has_unit_mass_and_is_even() {
        let rule = mollifier_rule();
        assert!((rule.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-14);
        let first: f64 = rule.iter().map(|p| p.0 * p.1).sum();
        assert!(first.abs() < 1e-15);
        // Z = 1 / 0.443993816168...
        let rule = GaussLegendre::new(8).unwrap();
        let mass: f64 = (0..8)
            .map(|k| {
                let lo = -1.0 + 0.25 * k as f64;
                rule.integrate(lo, lo + 0.25, |z| (-1.0 / (1.0 - z * z)).exp())
            })
            .sum();
        assert!((mass - 0.443_993_816_168_079_4).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn smooth_mode_on_a_bump() {
        let r = check_density(&spec("bump:c=0.5;r=0.3"), 0.3, 2.0, Side::Left, DensityMode::Smooth, grid()).unwrap();
        assert!(r.passed, "{} {:?}", r.summary(), r.ratios);
        assert!(r.metrics["final_error"] <= 1e-3);
    }

    #[test]
    fn smooth_mode_on_a_power() {
        // x^1.3 is smooth inside; the interpolant would spoil the window near 0
        let r = check_density(&spec("pow:a=0;terms=1*1.3"), 0.5, 1.5, Side::Left, DensityMode::Smooth, grid()).unwrap();
        assert!(r.passed, "{} {:?}", r.summary(), r.ratios);
        assert!(r.metrics["final_error"] < 1e-4);
    }

    #[test]
    fn smooth_mode_subtracts_the_kernel() {
        let u = spec("2*kappa:alpha=0.5;side=left + bump:c=0.6;r=0.2");
        let r = check_density(&u, 0.5, 1.5, Side::Left, DensityMode::Smooth, grid()).unwrap();
        assert!(r.passed, "{} {:?}", r.summary(), r.ratios);
        let c = check_density(&spec("const:1"), 0.3, 2.0, Side::Left, DensityMode::Smooth, grid()).unwrap();
        assert!(c.passed);
        assert!(c.ratios.iter().all(|&e| e < 1e-12), "{:?}", c.ratios);
    }

    #[test]
    fn piecewise_constants_reproduce_themselves() {
        let step = spec("step:c=0.5;h=1");
        let r = check_density(&step, 0.3, 2.0, Side::Left, DensityMode::PiecewiseConstant, grid()).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert!(r.ratios.iter().all(|&e| e == 0.0));
        assert!(r.metrics["norm"].is_finite());
    }

    #[test]
    fn piecewise_mode_on_smooth_data() {
        let u = spec("pow:a=0;terms=1*1.3");
        let r = check_density(&u, 0.3, 2.0, Side::Left, DensityMode::PiecewiseConstant, grid()).unwrap();
        assert!(r.passed, "{} {:?}", r.summary(), r.ratios);
        assert!(r.ratios[4] < r.ratios[0]);
    }

    #[test]
    fn density_guards() {
        let b = spec("bump:c=0.5;r=0.3");
        assert!(matches!(
            check_density(&b, 0.6, 2.0, Side::Left, DensityMode::PiecewiseConstant, grid()),
            Err(Error::Hypothesis(_))
        ));
        let step = spec("step:c=0.5;h=1");
        assert!(matches!(
            check_density(&step, 0.6, 2.0, Side::Left, DensityMode::Smooth, grid()),
            Err(Error::Hypothesis(_))
        ));
    }
}
