use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{Grid, SampledFunction, Side};
use crate::oracle::{ClosedForm, FunctionSpec};

/// Version stamped into every report.
pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a check was run on.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportInputs {
    pub functions: Vec<String>,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    pub grid_sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl ReportInputs {
    pub fn new(functions: Vec<String>, alpha: f64) -> Self {
        Self {
            functions,
            alpha,
            ..Self::default()
        }
    }

    pub fn on(mut self, grid: &Grid) -> Self {
        self.domain = Some([grid.a(), grid.b()]);
        self.grid_sizes.push(grid.n());
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = Some(side);
        self
    }

    pub fn with_variant(mut self, variant: impl Into<String>) -> Self {
        self.variant = Some(variant.into());
        self
    }
}

/// Outcome of one executable check.
///
/// `passed` holds when both arrays are non-empty, every residual is at most
/// `tolerance` and, if `ratio_bound` is set, every ratio is at most that
/// bound. Non-finite entries are stored as `f64::MAX` so that reports stay
/// valid JSON; they always fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub inputs: ReportInputs,
    pub residuals: Vec<f64>,
    pub ratios: Vec<f64>,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bound: Option<f64>,
    pub passed: bool,
    pub notes: String,
    pub version: String,
    /// Named scalar results (recovered constants, slopes, drifts).
    #[serde(flatten)]
    pub metrics: BTreeMap<String, f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

impl VerificationReport {
    pub(crate) fn new(theorem_id: &str, inputs: ReportInputs, tolerance: f64) -> Self {
        Self {
            theorem_id: theorem_id.to_string(),
            inputs,
            residuals: Vec::new(),
            ratios: Vec::new(),
            tolerance,
            ratio_bound: None,
            passed: false,
            notes: String::new(),
            version: REPORT_VERSION.to_string(),
            metrics: BTreeMap::new(),
        }
    }

    pub(crate) fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), sanitize(value));
    }

    pub(crate) fn note(&mut self, text: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
    }

    /// Fixes `passed` from the recorded numbers.
    pub(crate) fn finish(mut self) -> Self {
        let bad = self.residuals.iter().chain(&self.ratios).any(|v| !v.is_finite());
        self.residuals.iter_mut().for_each(|v| *v = sanitize(*v));
        self.ratios.iter_mut().for_each(|v| *v = sanitize(*v));
        let residuals_ok = self.residuals.iter().all(|&r| r <= self.tolerance);
        let ratios_ok = match self.ratio_bound {
            Some(bound) => self.ratios.iter().all(|&r| r <= bound),
            None => true,
        };
        self.passed = !bad
            && !self.residuals.is_empty()
            && !self.ratios.is_empty()
            && residuals_ok
            && ratios_ok;
        self
    }

    /// The same report judged against another residual tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.finish()
    }

    /// `PASS`/`FAIL` summary line.
    pub fn summary(&self) -> String {
        let worst = self.residuals.iter().fold(0.0f64, |m, &r| m.max(r));
        format!(
            "{} {:<20} max residual {:.3e} (tol {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.theorem_id,
            worst,
            self.tolerance
        )
    }
}

/// Test functions for the checks, kept as specs so that every check can
/// resample them on refined grids.
#[derive(Debug, Clone, PartialEq)]
pub struct TestBattery {
    pub members: Vec<FunctionSpec>,
}

impl TestBattery {
    pub fn new(members: Vec<FunctionSpec>) -> Self {
        Self { members }
    }

    pub fn parse(specs: &[&str]) -> Result<Self> {
        let members = specs.iter().map(|s| FunctionSpec::parse(s)).collect::<Result<_>>()?;
        Ok(Self { members })
    }

    /// Twelve functions on `(0, 1)`: smooth, kernel-type and a step.
    pub fn default_interval() -> Self {
        Self::parse(&[
            "const:1",
            "pow:a=0;terms=1*1",
            "pow:a=0;terms=1*1.3",
            "pow:a=0;terms=1*2",
            "pow:a=0;terms=1*0.5",
            "kappa:alpha=0.5;side=left",
            "kappa:alpha=0.75;side=left",
            "step:c=0.5;h=1",
            "bump:c=0.5;r=0.25",
            "bump:c=0.35;r=0.15",
            "2*kappa:alpha=0.5;side=left + bump:c=0.6;r=0.2",
            "gauss:mu=0.5;s=0.15",
        ])
        .expect("built-in battery parses")
    }

    /// Members with and without a kernel part of order 0.3, a jump, smooth
    /// bumps and a narrow Gaussian.
    pub fn kernel_interval() -> Self {
        Self::parse(&[
            "const:1",
            "pow:a=0;terms=1*1",
            "pow:a=0;terms=1*1.3",
            "pow:a=0;terms=1*2",
            "pow:a=0;terms=1*0.5",
            "kappa:alpha=0.3;side=left",
            "2*kappa:alpha=0.3;side=left + bump:c=0.6;r=0.2",
            "step:c=0.5;h=1",
            "bump:c=0.5;r=0.25",
            "bump:c=0.35;r=0.15",
            "gauss:mu=0.5;s=0.15",
        ])
        .expect("built-in battery parses")
    }

    /// Continuous members without a kernel part.
    pub fn regular_interval() -> Self {
        Self::parse(&[
            "const:1",
            "pow:a=0;terms=1*1",
            "pow:a=0;terms=1*1.3",
            "pow:a=0;terms=1*2",
            "pow:a=0;terms=1*0.5",
            "pow:a=0;terms=1*3",
            "bump:c=0.5;r=0.25",
            "bump:c=0.35;r=0.15",
            "bump:c=0.7;r=0.2",
            "gauss:mu=0.5;s=0.15",
        ])
        .expect("built-in battery parses")
    }

    /// Members of the order-0.75 space for the trace and Hölder checks.
    pub fn trace_default() -> Self {
        Self::parse(&[
            "bump:c=0.5;r=0.3",
            "bump:c=0.7;r=0.2;h=2",
            "bump:c=0.4;r=0.35",
            "kappa:alpha=0.75;side=left",
            "pow:a=0;terms=1*1.3",
        ])
        .expect("built-in battery parses")
    }

    /// `count` bumps strictly inside `(a, b)` with varied centres and radii.
    pub fn bumps(a: f64, b: f64, count: usize) -> Self {
        let w = b - a;
        let members = (0..count)
            .map(|k| {
                let t = (k as f64 + 0.5) / count as f64;
                let r = w * (0.06 + 0.04 * ((k % 3) as f64));
                let c = (a + r + 0.02 * w) + t * (w - 2.0 * r - 0.04 * w);
                let amp = 1.0 + 0.25 * (k % 4) as f64;
                FunctionSpec::parse(&format!("bump:c={c};r={r};h={amp}")).expect("bump spec")
            })
            .collect();
        Self { members }
    }

    /// Ten decaying functions on the line: Gaussians of several widths
    /// and bumps.
    pub fn line_default() -> Self {
        Self::parse(&[
            "gauss:mu=0;s=1",
            "gauss:mu=0.5;s=0.7",
            "gauss:mu=-1;s=1.5",
            "gauss:mu=0;s=0.5",
            "gauss:mu=0.3;s=1.2",
            "gauss:mu=0;s=2",
            "gauss:mu=1;s=0.8",
            "bump:c=0;r=2",
            "bump:c=1;r=3",
            "bump:c=-1;r=1.5",
        ])
        .expect("built-in battery parses")
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(|m| m.to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub(crate) fn resolve(spec: &FunctionSpec, grid: &Grid) -> ClosedForm {
    spec.resolve(grid.a(), grid.b())
}

pub(crate) fn sample(spec: &FunctionSpec, grid: &Grid) -> Result<SampledFunction> {
    resolve(spec, grid).sample(*grid)
}

/// Nodes of the middle 80% of the grid.
pub(crate) fn interior(grid: &Grid) -> std::ops::RangeInclusive<usize> {
    let n = grid.n();
    n.div_ceil(10)..=(9 * n) / 10
}

/// `max |u - v| / max |v|` over the middle 80% of nodes.
pub(crate) fn interior_rel_linf(u: &SampledFunction, reference: &SampledFunction) -> f64 {
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for j in interior(u.grid()) {
        err = err.max((u.value(j) - reference.value(j)).abs());
        scale = scale.max(reference.value(j).abs());
    }
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// `|lhs - rhs| / scale`, zero when both sides and the scale vanish.
pub(crate) fn relative_gap(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let gap = (lhs - rhs).abs();
    if gap == 0.0 {
        0.0
    } else {
        gap / scale
    }
}

/// `lhs / rhs`, defined as 0 when both are negligible against `scale`.
pub(crate) fn guarded_ratio(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let eps = 1e-10 * scale;
    if lhs <= eps && rhs <= eps {
        0.0
    } else {
        lhs / rhs
    }
}
