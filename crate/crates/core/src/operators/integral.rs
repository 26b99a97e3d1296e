use super::singular::{snap, split_left, PowerLead, Split};
use super::{by_side, check_order};
use crate::error::Result;
use crate::numerics::{gamma_fn, product_trapezoid_coeffs, SampledFunction, Side, Singular};
use crate::par::map_range;

/// Left integral of order `alpha` at chosen nodes, shared with the endpoint
/// constant extraction.
pub(crate) struct LeftIntegral {
    scale: f64,
    first: Vec<f64>,
    interior: Vec<f64>,
    split: Split,
    lead_factor: f64,
    alpha: f64,
    h: f64,
}

impl LeftIntegral {
    pub fn new(u: &SampledFunction, alpha: f64) -> Result<Self> {
        let split = split_left(u, None)?;
        let c = product_trapezoid_coeffs(alpha, u.grid());
        let lead_factor = match split.lead {
            Some(PowerLead { exponent, .. }) => {
                gamma_fn(exponent + 1.0)? / gamma_fn(exponent + 1.0 + alpha)?
            }
            None => 0.0,
        };
        Ok(Self {
            scale: c.scale,
            first: c.first,
            interior: c.interior,
            split,
            lead_factor,
            alpha,
            h: u.grid().h(),
        })
    }

    /// Integral of the regular remainder at node `j`.
    pub fn regular_at(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let r = &self.split.rest;
        let mut s = self.first[j] * r[0];
        for i in 1..j {
            s += self.interior[j - i] * r[i];
        }
        self.scale * (s + r[j])
    }

    /// Leading power after integration: coefficient and exponent.
    pub fn lead(&self) -> Option<(f64, f64)> {
        self.split.lead.map(|l| {
            (
                l.coeff * self.lead_factor,
                snap(l.exponent + self.alpha, 0.0),
            )
        })
    }

    pub fn at(&self, j: usize) -> f64 {
        let n = self.split.rest.len() - 1;
        if j == n && self.split.far_flagged {
            return f64::INFINITY;
        }
        let mut v = self.regular_at(j);
        if let Some((c, e)) = self.lead() {
            let x = j as f64 * self.h;
            v += if j == 0 && e < 0.0 {
                f64::INFINITY
            } else {
                c * x.powf(e)
            };
        }
        v
    }

    fn output_flags(&self) -> Singular {
        Singular {
            left: self.lead().is_some_and(|(_, e)| e < 0.0),
            right: self.split.far_flagged,
        }
    }
}

fn left_integral(u: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    let op = LeftIntegral::new(u, alpha)?;
    let values = map_range(u.grid().len(), |j| op.at(j));
    SampledFunction::with_singular(*u.grid(), values, op.output_flags())
}

/// Riemann-Liouville integral `I^α u` at the nodes.
///
/// Exact for piecewise-linear data (product trapezoid rule). A flagged base
/// node is handled by splitting off the power law fitted to the first two
/// regular nodes and integrating it in closed form.
pub fn frac_integral(u: &SampledFunction, alpha: f64, side: Side) -> Result<SampledFunction> {
    check_order(alpha, 0.0, f64::INFINITY, false)?;
    by_side(u, side, |v| left_integral(v, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;
    use crate::oracle::{oracle_frac_integral, ClosedForm};
    use approx::assert_relative_eq;

    #[test]
    fn constant_at_one() {
        let g = uniform_grid(0.0, 1.0, 256).unwrap();
        let u = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        let i = frac_integral(&u, 0.5, Side::Left).unwrap();
        assert!((i.value(256) - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
    }

    #[test]
    fn power_against_oracle() {
        let g = uniform_grid(0.0, 1.0, 1024).unwrap();
        let f = ClosedForm::power(0.0, Side::Left, vec![(1.0, 1.3)]);
        let exact = oracle_frac_integral(&f, 0.4, Side::Left, 0.0).unwrap();
        let i = frac_integral(&f.sample(g).unwrap(), 0.4, Side::Left).unwrap();
        let mut worst = 0.0f64;
        for (j, v) in i.values().iter().enumerate() {
            worst = worst.max((v - exact.eval(g.node(j))).abs());
        }
        let peak = exact.eval(1.0);
        assert!(worst / peak <= 1e-4, "{}", worst / peak);
    }

    #[test]
    fn kernel_integrates_to_gamma() {
        let g = uniform_grid(0.0, 1.0, 512).unwrap();
        let k = ClosedForm::kappa(0.3, Side::Left, 0.0, 1.0).sample(g).unwrap();
        let i = frac_integral(&k, 0.7, Side::Left).unwrap();
        let want = gamma_fn(0.3).unwrap();
        for v in i.values() {
            assert_relative_eq!(*v, want, max_relative = 1e-12);
        }
        assert!(!i.singular().any());
    }

    #[test]
    fn reflection_symmetry() {
        let g = uniform_grid(-1.0, 2.0, 300).unwrap();
        let u = SampledFunction::from_fn(g, |x| (3.0 * x).sin() + x * x).unwrap();
        let right = frac_integral(&u, 0.35, Side::Right).unwrap();
        let left = frac_integral(&u.reflect(), 0.35, Side::Left).unwrap().reflect();
        for (a, b) in right.values().iter().zip(left.values()) {
            assert!((a - b).abs() <= 1e-14);
        }
    }
}
