//! Textual function specs, e.g. `2*kappa:alpha=0.5;side=left + bump:c=0.5;r=0.2`.
//!
//! Atoms:
//!
//! * `pow:a=0;terms=1*-0.5,2*1.3[;side=left|right]`
//! * `step:c=0.5;h=1[;side=left|right]`
//! * `gauss:mu=0;s=1[;amp=1]`
//! * `bump:c=0.5;r=0.25[;h=1]`
//! * `const:1`
//! * `kappa:alpha=0.5;side=left` (anchored at the domain endpoint)
//!
//! Atoms are joined with `+` and may carry a `k*` prefix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::form::{Atom, ClosedForm};
use crate::error::{Error, Result};
use crate::numerics::Side;

#[derive(Debug, Clone, PartialEq)]
enum Part {
    Atom(Atom),
    Kappa { alpha: f64, side: Side, scale: f64 },
}

/// Parsed function spec. Kernels stay symbolic until [`FunctionSpec::resolve`]
/// fixes the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    parts: Vec<Part>,
}

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| perr(format!("bad number `{s}` for {what}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(perr(format!("non-finite {what}")))
    }
}

/// Splits on `+` signs that are not part of a number.
fn split_sum(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut prev: Option<char> = None;
    for (i, ch) in s.char_indices() {
        if ch == '+' {
            let joins = matches!(prev, None | Some('e' | 'E' | '*' | ',' | '=' | ':'));
            if !joins {
                parts.push(&s[start..i]);
                start = i + 1;
            }
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    parts.push(&s[start..]);
    parts
}

fn keyvals<'a>(body: &'a str, allowed: &[&str]) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut map = BTreeMap::new();
    for item in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| perr(format!("expected key=value, got `{item}`")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(perr(format!("unknown key `{k}`")));
        }
        if map.insert(k, v.trim()).is_some() {
            return Err(perr(format!("duplicate key `{k}`")));
        }
    }
    Ok(map)
}

fn required<'a>(map: &BTreeMap<&str, &'a str>, key: &str, atom: &str) -> Result<&'a str> {
    map.get(key)
        .copied()
        .ok_or_else(|| perr(format!("`{atom}` needs `{key}`")))
}

fn side_of(map: &BTreeMap<&str, &str>) -> Result<Side> {
    map.get("side").map_or(Ok(Side::Left), |s| s.parse())
}

fn parse_part(text: &str) -> Result<Part> {
    let text = text.trim();
    let (head, body) = text
        .split_once(':')
        .ok_or_else(|| perr(format!("expected name:params, got `{text}`")))?;
    let (scale, name) = match head.rsplit_once('*') {
        Some((k, name)) => (num(k, "scale")?, name.trim()),
        None => (1.0, head.trim()),
    };
    let atom = match name {
        "pow" => {
            let m = keyvals(body, &["a", "terms", "side"])?;
            let anchor = num(required(&m, "a", name)?, "anchor")?;
            let mut terms = Vec::new();
            for t in required(&m, "terms", name)?.split(',') {
                let (c, b) = t
                    .split_once('*')
                    .ok_or_else(|| perr(format!("expected coeff*exponent, got `{t}`")))?;
                let b = num(b, "exponent")?;
                if b <= -1.0 {
                    return Err(perr(format!("exponent {b} is not integrable")));
                }
                terms.push((scale * num(c, "coefficient")?, b));
            }
            Atom::Power {
                anchor,
                side: side_of(&m)?,
                terms,
            }
        }
        "step" => {
            let m = keyvals(body, &["c", "h", "side"])?;
            Atom::Step {
                at: num(required(&m, "c", name)?, "c")?,
                height: scale * m.get("h").map_or(Ok(1.0), |h| num(h, "h"))?,
                side: side_of(&m)?,
            }
        }
        "gauss" => {
            let m = keyvals(body, &["mu", "s", "amp"])?;
            let width = m.get("s").map_or(Ok(1.0), |s| num(s, "s"))?;
            if width <= 0.0 {
                return Err(perr("gaussian width must be positive"));
            }
            Atom::Gaussian {
                center: m.get("mu").map_or(Ok(0.0), |s| num(s, "mu"))?,
                width,
                amp: scale * m.get("amp").map_or(Ok(1.0), |s| num(s, "amp"))?,
            }
        }
        "bump" => {
            let m = keyvals(body, &["c", "r", "h"])?;
            let radius = num(required(&m, "r", name)?, "r")?;
            if radius <= 0.0 {
                return Err(perr("bump radius must be positive"));
            }
            Atom::Bump {
                center: num(required(&m, "c", name)?, "c")?,
                radius,
                amp: scale * m.get("h").map_or(Ok(1.0), |s| num(s, "h"))?,
            }
        }
        "const" => Atom::Const(scale * num(body, "constant")?),
        "kappa" => {
            let m = keyvals(body, &["alpha", "side"])?;
            let alpha = num(required(&m, "alpha", name)?, "alpha")?;
            if alpha <= 0.0 {
                return Err(perr("kappa needs alpha > 0"));
            }
            return Ok(Part::Kappa {
                alpha,
                side: side_of(&m)?,
                scale,
            });
        }
        other => return Err(perr(format!("unknown function `{other}`"))),
    };
    Ok(Part::Atom(atom))
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(perr("empty function spec"));
        }
        let parts = split_sum(text)
            .into_iter()
            .map(parse_part)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { parts })
    }

    /// Closed form on the interval `[a, b]`.
    pub fn resolve(&self, a: f64, b: f64) -> ClosedForm {
        let atoms = self
            .parts
            .iter()
            .map(|p| match p {
                Part::Atom(atom) => atom.clone(),
                Part::Kappa { alpha, side, scale } => Atom::Power {
                    anchor: if *side == Side::Left { a } else { b },
                    side: *side,
                    terms: vec![(*scale, alpha - 1.0)],
                },
            })
            .collect();
        ClosedForm::new(atoms)
    }

    /// Closed form on `[-L, L]`.
    pub fn resolve_line(&self, half_width: f64) -> ClosedForm {
        self.resolve(-half_width, half_width)
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn side_suffix(side: Side) -> &'static str {
    match side {
        Side::Left => "",
        Side::Right => ";side=right",
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Kappa { alpha, side, scale } => {
                if *scale != 1.0 {
                    write!(f, "{scale}*")?;
                }
                write!(f, "kappa:alpha={alpha};side={side}")
            }
            Part::Atom(Atom::Power {
                anchor,
                side,
                terms,
            }) => {
                let terms: Vec<String> = terms.iter().map(|(c, b)| format!("{c}*{b}")).collect();
                write!(f, "pow:a={anchor};terms={}{}", terms.join(","), side_suffix(*side))
            }
            Part::Atom(Atom::Step { at, height, side }) => {
                write!(f, "step:c={at};h={height}{}", side_suffix(*side))
            }
            Part::Atom(Atom::Gaussian { center, width, amp }) => {
                write!(f, "gauss:mu={center};s={width}")?;
                if *amp != 1.0 {
                    write!(f, ";amp={amp}")?;
                }
                Ok(())
            }
            Part::Atom(Atom::Bump {
                center,
                radius,
                amp,
            }) => {
                write!(f, "bump:c={center};r={radius}")?;
                if *amp != 1.0 {
                    write!(f, ";h={amp}")?;
                }
                Ok(())
            }
            Part::Atom(Atom::Const(c)) => write!(f, "const:{c}"),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
