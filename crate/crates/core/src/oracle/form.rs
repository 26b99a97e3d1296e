use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Grid, LineFunction, SampledFunction, Side};

/// One member of the closed family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Atom {
    /// `Σ c (x - anchor)^β` right of the anchor (`Left`) or `Σ c (anchor - x)^β`
    /// left of it (`Right`); zero on the other side.
    Power {
        anchor: f64,
        side: Side,
        terms: Vec<(f64, f64)>,
    },
    /// `height · 1[x > at]` (`Left`) or `height · 1[x < at]` (`Right`).
    /// Sampled at the jump with the midpoint value.
    Step { at: f64, height: f64, side: Side },
    /// `amp · exp(-(x - center)^2 / (2 width^2))`.
    Gaussian { center: f64, width: f64, amp: f64 },
    /// `amp · exp(1 - 1/(1 - t^2))`, `t = (x - center)/radius`; peak value `amp`.
    Bump { center: f64, radius: f64, amp: f64 },
    Const(f64),
}

impl Atom {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Atom::Power {
                anchor,
                side,
                terms,
            } => {
                let d = match side {
                    Side::Left => x - anchor,
                    Side::Right => anchor - x,
                };
                if d < 0.0 {
                    return 0.0;
                }
                if d == 0.0 {
                    return power_at_anchor(terms);
                }
                terms.iter().map(|(c, b)| c * d.powf(*b)).sum()
            }
            Atom::Step { at, height, side } => {
                let inside = match side {
                    Side::Left => x > *at,
                    Side::Right => x < *at,
                };
                if x == *at {
                    0.5 * height
                } else if inside {
                    *height
                } else {
                    0.0
                }
            }
            Atom::Gaussian { center, width, amp } => {
                let z = (x - center) / width;
                amp * (-0.5 * z * z).exp()
            }
            Atom::Bump {
                center,
                radius,
                amp,
            } => {
                let t = (x - center) / radius;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    amp * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Atom::Const(c) => *c,
        }
    }

    pub fn scaled(&self, k: f64) -> Atom {
        match self {
            Atom::Power {
                anchor,
                side,
                terms,
            } => Atom::Power {
                anchor: *anchor,
                side: *side,
                terms: terms.iter().map(|(c, b)| (k * c, *b)).collect(),
            },
            Atom::Step { at, height, side } => Atom::Step {
                at: *at,
                height: k * height,
                side: *side,
            },
            Atom::Gaussian { center, width, amp } => Atom::Gaussian {
                center: *center,
                width: *width,
                amp: k * amp,
            },
            Atom::Bump {
                center,
                radius,
                amp,
            } => Atom::Bump {
                center: *center,
                radius: *radius,
                amp: k * amp,
            },
            Atom::Const(c) => Atom::Const(k * c),
        }
    }

    /// Continuous transform `∫ f e^{-iξx} dx`, when known in closed form.
    pub fn fourier(&self, xi: f64) -> Option<Complex64> {
        match self {
            Atom::Gaussian { center, width, amp } => {
                let mag = amp * width * (2.0 * std::f64::consts::PI).sqrt()
                    * (-0.5 * (width * xi).powi(2)).exp();
                Some(Complex64::from_polar(mag, -xi * center))
            }
            _ => None,
        }
    }
}

fn power_at_anchor(terms: &[(f64, f64)]) -> f64 {
    // the most singular term decides
    let mut worst: Option<(f64, f64)> = None;
    let mut finite = 0.0;
    for &(c, b) in terms {
        if c == 0.0 {
            continue;
        }
        if b < 0.0 {
            if worst.is_none_or(|(_, wb)| b < wb) {
                worst = Some((c, b));
            }
        } else if b == 0.0 {
            finite += c;
        }
    }
    match worst {
        Some((c, _)) => c.signum() * f64::INFINITY,
        None => finite,
    }
}

/// Finite sum of [`Atom`]s.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClosedForm {
    pub atoms: Vec<Atom>,
}

impl ClosedForm {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![Atom::Const(c)])
    }

    /// Single power sum.
    pub fn power(anchor: f64, side: Side, terms: Vec<(f64, f64)>) -> Self {
        Self::new(vec![Atom::Power {
            anchor,
            side,
            terms,
        }])
    }

    /// The kernel `(x - a)^{α-1}` (left) or `(b - x)^{α-1}` (right).
    pub fn kappa(alpha: f64, side: Side, a: f64, b: f64) -> Self {
        let anchor = match side {
            Side::Left => a,
            Side::Right => b,
        };
        Self::power(anchor, side, vec![(1.0, alpha - 1.0)])
    }

    pub fn step(at: f64, height: f64) -> Self {
        Self::new(vec![Atom::Step {
            at,
            height,
            side: Side::Left,
        }])
    }

    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::new(vec![Atom::Gaussian {
            center,
            width,
            amp: 1.0,
        }])
    }

    pub fn bump(center: f64, radius: f64) -> Self {
        Self::new(vec![Atom::Bump {
            center,
            radius,
            amp: 1.0,
        }])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn plus(mut self, other: ClosedForm) -> Self {
        self.atoms.extend(other.atoms);
        self
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.atoms.iter().map(|a| a.scaled(k)).collect())
    }

    /// Samples on a grid; non-finite endpoint values become flagged nodes.
    pub fn sample(&self, grid: Grid) -> Result<SampledFunction> {
        SampledFunction::from_fn(grid, |x| self.eval(x))
    }

    /// Samples on `n` cells of `[-L, L]`.
    pub fn sample_line(&self, half_width: f64, n: usize) -> Result<LineFunction> {
        let u = LineFunction::from_fn(half_width, n, |x| self.eval(x))?;
        Ok(u)
    }

    /// Closed-form transform, when every atom has one.
    pub fn fourier(&self, xi: f64) -> Option<Complex64> {
        self.atoms.iter().map(|a| a.fourier(xi)).sum()
    }

    /// Whether the function is smooth with vanishing values and derivatives
    /// at both ends of `[a, b]`: only bumps strictly inside.
    pub fn compactly_supported_in(&self, a: f64, b: f64) -> bool {
        self.atoms.iter().all(|atom| match atom {
            Atom::Bump { center, radius, .. } => center - radius > a && center + radius < b,
            Atom::Const(c) => *c == 0.0,
            _ => false,
        })
    }

    /// True when no atom is singular or discontinuous inside the open
    /// interval and the function is finite on `[a, b]`.
    pub fn continuous_on(&self, a: f64, b: f64) -> bool {
        self.atoms.iter().all(|atom| match atom {
            Atom::Power { anchor, terms, .. } => {
                let closed = *anchor >= a && *anchor <= b;
                let open = *anchor > a && *anchor < b;
                terms.iter().all(|&(c, e)| {
                    c == 0.0 || e > 0.0 || (e == 0.0 && !open) || (e < 0.0 && !closed)
                })
            }
            Atom::Step { at, height, .. } => *height == 0.0 || *at <= a || *at >= b,
            _ => true,
        })
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        let ok = self.atoms.iter().all(|a| match a {
            Atom::Power { anchor, terms, .. } => {
                anchor.is_finite() && terms.iter().all(|(c, b)| c.is_finite() && b.is_finite())
            }
            Atom::Step { at, height, .. } => at.is_finite() && height.is_finite(),
            Atom::Gaussian { center, width, amp } => {
                center.is_finite() && amp.is_finite() && width.is_finite() && *width > 0.0
            }
            Atom::Bump {
                center,
                radius,
                amp,
            } => center.is_finite() && amp.is_finite() && radius.is_finite() && *radius > 0.0,
            Atom::Const(c) => c.is_finite(),
        });
        if ok {
            Ok(())
        } else {
            Err(Error::domain("non-finite or degenerate parameter in closed form"))
        }
    }
}
