use serde::{Deserialize, Serialize};

use super::form::{Atom, ClosedForm};
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, rgamma, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeKind {
    RiemannLiouville,
    Caputo,
}

/// A power sum oriented like the operator it is fed to.
struct Oriented {
    anchor: f64,
    terms: Vec<(f64, f64)>,
}

/// Rewrites `f` as power sums oriented towards `side` with anchors that the
/// one-sided operator from `base` sees correctly.
fn orient(f: &ClosedForm, side: Side, base: f64) -> Result<Vec<Oriented>> {
    let mut out = Vec::new();
    for atom in &f.atoms {
        let (anchor, s, terms) = match atom {
            Atom::Power {
                anchor,
                side,
                terms,
            } => (*anchor, *side, terms.clone()),
            Atom::Step { at, height, side } => (*at, *side, vec![(*height, 0.0)]),
            Atom::Const(c) => (base, side, vec![(*c, 0.0)]),
            Atom::Gaussian { .. } | Atom::Bump { .. } => {
                return Err(Error::unsupported(
                    "fractional calculus of Gaussians and bumps is not in the closed family",
                ))
            }
        };
        if terms.iter().any(|(_, b)| *b <= -1.0) {
            return Err(Error::domain("power exponent must exceed -1"));
        }
        if s == side {
            let reachable = match side {
                Side::Left => anchor >= base,
                Side::Right => anchor <= base,
            };
            if !reachable {
                return Err(Error::unsupported(format!(
                    "power anchored at {anchor} does not start at or after the base point {base}"
                )));
            }
            out.push(Oriented { anchor, terms });
        } else {
            // only indicator-type atoms can be flipped: 1[x > c] = 1 - 1[x < c]
            if terms.iter().any(|(c, b)| *c != 0.0 && *b != 0.0) {
                return Err(Error::unsupported(
                    "power sum oriented against the operator side",
                ));
            }
            let height: f64 = terms.iter().map(|(c, _)| c).sum();
            // the flipped indicator vanishes on everything the operator sees
            let vanishes = match side {
                Side::Left => anchor <= base,
                Side::Right => anchor >= base,
            };
            if !vanishes {
                out.push(Oriented {
                    anchor: base,
                    terms: vec![(height, 0.0)],
                });
                out.push(Oriented {
                    anchor,
                    terms: vec![(-height, 0.0)],
                });
            }
        }
    }
    Ok(out)
}

fn rebuild(parts: Vec<Oriented>, side: Side) -> ClosedForm {
    ClosedForm::new(
        parts
            .into_iter()
            .filter(|p| !p.terms.is_empty())
            .map(|p| Atom::Power {
                anchor: p.anchor,
                side,
                terms: p.terms,
            })
            .collect(),
    )
}

/// Exact `I^α f` from the base point (`a` for left, `b` for right).
pub fn oracle_frac_integral(f: &ClosedForm, alpha: f64, side: Side, base: f64) -> Result<ClosedForm> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("integral order must be >= 0, got {alpha}")));
    }
    f.check_finite()?;
    let parts = orient(f, side, base)?;
    if alpha == 0.0 {
        return Ok(rebuild(parts, side));
    }
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let mut terms = Vec::with_capacity(p.terms.len());
        for (c, b) in p.terms {
            let k = gamma_fn(b + 1.0)? / gamma_fn(b + 1.0 + alpha)?;
            terms.push((c * k, b + alpha));
        }
        out.push(Oriented {
            anchor: p.anchor,
            terms,
        });
    }
    Ok(rebuild(out, side))
}

/// Exact derivative of order `0 <= α < 1`.
///
/// A term whose exponent lands on `-1` is dropped: `D^α (x-a)^{α-1} = 0`.
pub fn oracle_frac_derivative(
    f: &ClosedForm,
    alpha: f64,
    side: Side,
    base: f64,
    kind: DerivativeKind,
) -> Result<ClosedForm> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!("derivative order must lie in [0, 1), got {alpha}")));
    }
    f.check_finite()?;
    let parts = orient(f, side, base)?;
    if kind == DerivativeKind::Caputo {
        for p in &parts {
            let smooth = p.terms.iter().all(|(c, b)| *c == 0.0 || *b == 0.0 || *b >= 1.0);
            if p.anchor != base || !smooth {
                return Err(Error::unsupported(
                    "Caputo derivative needs a function differentiable on the closed interval",
                ));
            }
        }
    }
    if alpha == 0.0 {
        return Ok(rebuild(parts, side));
    }
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let mut terms = Vec::with_capacity(p.terms.len());
        for (c, b) in p.terms {
            let e = b - alpha;
            if (e + 1.0).abs() < 1e-12 {
                continue;
            }
            if e < -1.0 {
                return Err(Error::Pole(b + 1.0 - alpha));
            }
            let is_constant = b == 0.0;
            if kind == DerivativeKind::Caputo && is_constant {
                // RL of the constant minus u(a)(x-a)^{-α}/Γ(1-α): cancels exactly
                continue;
            }
            terms.push((c * gamma_fn(b + 1.0)? * rgamma(b + 1.0 - alpha), e));
        }
        out.push(Oriented {
            anchor: p.anchor,
            terms,
        });
    }
    Ok(rebuild(out, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

    #[test]
    fn integral_of_one() {
        let i = oracle_frac_integral(&ClosedForm::constant(1.0), 0.5, Side::Left, 0.0).unwrap();
        assert_relative_eq!(i.eval(1.0), FRAC_2_SQRT_PI, max_relative = 1e-14);
    }

    #[test]
    fn integral_of_kernel_is_gamma() {
        for &a in &[0.2, 0.5, 0.8] {
            let k = ClosedForm::kappa(a, Side::Left, 0.0, 1.0);
            let i = oracle_frac_integral(&k, 1.0 - a, Side::Left, 0.0).unwrap();
            let g = gamma_fn(a).unwrap();
            for x in [0.1, 0.5, 1.0] {
                assert_relative_eq!(i.eval(x), g, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn zero_order_is_identity() {
        let f = ClosedForm::power(0.0, Side::Left, vec![(2.0, 1.3), (1.0, -0.5)]);
        let i = oracle_frac_integral(&f, 0.0, Side::Left, 0.0).unwrap();
        assert_eq!(i.eval(0.3), f.eval(0.3));
    }

    #[test]
    fn derivative_of_one() {
        let d = oracle_frac_derivative(
            &ClosedForm::constant(1.0),
            0.5,
            Side::Left,
            0.0,
            DerivativeKind::RiemannLiouville,
        )
        .unwrap();
        assert_relative_eq!(d.eval(0.25), FRAC_2_SQRT_PI, max_relative = 1e-14);
        let c = oracle_frac_derivative(
            &ClosedForm::constant(1.0),
            0.5,
            Side::Left,
            0.0,
            DerivativeKind::Caputo,
        )
        .unwrap();
        assert_eq!(c.eval(0.25), 0.0);
    }

    #[test]
    fn kernel_is_annihilated() {
        let k = ClosedForm::kappa(0.3, Side::Right, 0.0, 1.0);
        let d =
            oracle_frac_derivative(&k, 0.3, Side::Right, 1.0, DerivativeKind::RiemannLiouville).unwrap();
        assert_eq!(d.eval(0.5), 0.0);
    }

    #[test]
    fn too_singular_is_a_pole() {
        let k = ClosedForm::power(0.0, Side::Left, vec![(1.0, -0.5)]);
        let r = oracle_frac_derivative(&k, 0.7, Side::Left, 0.0, DerivativeKind::RiemannLiouville);
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn step_maps_to_shifted_power() {
        let s = ClosedForm::step(0.5, 2.0);
        let d =
            oracle_frac_derivative(&s, 0.5, Side::Left, 0.0, DerivativeKind::RiemannLiouville).unwrap();
        assert_eq!(d.eval(0.4), 0.0);
        assert_relative_eq!(d.eval(0.75), 2.0 * 0.25f64.powf(-0.5) / gamma_fn(0.5).unwrap(), max_relative = 1e-14);
        // right operator: 1[x > 0.5] seen from b = 1 is 1[x > 0.5] = 1 - 1[x < 0.5]
        let r =
            oracle_frac_derivative(&s, 0.5, Side::Right, 1.0, DerivativeKind::RiemannLiouville).unwrap();
        let k = 2.0 / gamma_fn(0.5).unwrap();
        assert_relative_eq!(r.eval(0.75), k * 0.25f64.powf(-0.5), max_relative = 1e-14);
        assert_relative_eq!(r.eval(0.25), k * (0.75f64.powf(-0.5) - 0.25f64.powf(-0.5)), max_relative = 1e-13);
    }

    #[test]
    fn unsupported_families() {
        let g = ClosedForm::gaussian(0.0, 1.0);
        assert!(matches!(
            oracle_frac_integral(&g, 0.5, Side::Left, 0.0),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            oracle_frac_derivative(&ClosedForm::step(0.5, 1.0), 0.5, Side::Left, 0.0, DerivativeKind::Caputo),
            Err(Error::Unsupported(_))
        ));
    }
}
