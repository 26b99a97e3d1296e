//! Default batteries for every check, runnable as named groups.

use serde::{Deserialize, Serialize};

use super::density::{check_density, DensityMode};
use super::embedding::{check_consistency_w1p, check_embedding_trace};
use super::extension::{extend_exterior, extend_interior, extend_trivial};
use super::inclusivity::check_inclusivity;
use super::inequalities::{check_poincare, check_sobolev_inequality, PoincareVariant, SobolevDomain};
use super::line::check_line_equivalences;
use super::pairing::{check_ftwfc, check_ibp, check_weak_pairing, Candidate, IbpVariant};
use super::report::{TestBattery, VerificationReport};
use crate::error::{Error, Result};
use crate::numerics::{Grid, SampledFunction, Side};
use crate::oracle::FunctionSpec;
use crate::par;

/// Grid size of the interval checks unless overridden.
pub const DEFAULT_N: usize = 2048;

/// Groups accepted by [`run_suite`] besides `all`.
pub const SUITE_GROUPS: [&str; 8] = [
    "pairing",
    "ibp",
    "inequalities",
    "extensions",
    "embedding",
    "line",
    "density",
    "inclusivity",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    /// Cells of the interval grid; coarser checks use fractions of it.
    pub n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { n: DEFAULT_N }
    }
}

/// One named run: the report, or the error that stopped the check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub case: String,
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.passed)
    }

    /// `PASS`/`FAIL` line with the case name.
    pub fn summary(&self) -> String {
        match (&self.report, &self.error) {
            (Some(r), _) => format!("{:<28} {}", self.case, r.summary()),
            (None, Some(e)) => format!("{:<28} FAIL error: {e}", self.case),
            (None, None) => format!("{:<28} FAIL no report", self.case),
        }
    }
}

type Runner = fn(&SuiteConfig) -> Result<VerificationReport>;

struct Case {
    name: &'static str,
    group: &'static str,
    run: Runner,
}

fn spec(s: &str) -> Result<FunctionSpec> {
    FunctionSpec::parse(s)
}

fn unit(n: usize) -> Result<Grid> {
    Grid::new(0.0, 1.0, n.max(16))
}

fn sampled(s: &str, n: usize) -> Result<SampledFunction> {
    let g = unit(n)?;
    spec(s)?.resolve(g.a(), g.b()).sample(g)
}

const CASES: &[Case] = &[
    Case {
        name: "weak_pairing",
        group: "pairing",
        run: |c| {
            let battery = TestBattery::bumps(0.0, 1.0, 10);
            check_weak_pairing(&spec("pow:a=0;terms=1*1.3")?, &Candidate::Oracle, 0.5, Side::Left, &battery, unit(c.n)?)
        },
    },
    Case {
        name: "weak_pairing_kernel",
        group: "pairing",
        run: |c| {
            let battery = TestBattery::bumps(0.0, 1.0, 10);
            let zero = Candidate::Spec(spec("const:0")?);
            check_weak_pairing(&spec("kappa:alpha=0.5;side=left")?, &zero, 0.5, Side::Left, &battery, unit(c.n)?)
        },
    },
    Case {
        name: "ftwfc",
        group: "pairing",
        run: |c| check_ftwfc(&spec("2*kappa:alpha=0.5;side=left + bump:c=0.6;r=0.2")?, 0.5, Side::Left, unit(c.n)?),
    },
    Case {
        name: "ibp_symmetric",
        group: "ibp",
        run: |c| {
            let (u, v) = (spec("bump:c=0.4;r=0.3")?, spec("bump:c=0.6;r=0.25")?);
            check_ibp(&u, &v, 0.75, 2.0, 2.0, IbpVariant::Symmetric, unit(c.n)?)
        },
    },
    Case {
        name: "ibp_zero_trace",
        group: "ibp",
        run: |c| {
            let (u, v) = (spec("kappa:alpha=0.75;side=left")?, spec("bump:c=0.6;r=0.25")?);
            check_ibp(&u, &v, 0.75, 2.0, 2.0, IbpVariant::OneSidedZeroTrace, unit(c.n)?)
        },
    },
    Case {
        name: "poincare_kernel_subtracted",
        group: "inequalities",
        run: |c| {
            let held = spec("pow:a=0;terms=1*2,-1*3")?;
            let v = PoincareVariant::KernelSubtracted;
            check_poincare(&TestBattery::kernel_interval(), &held, 0.3, 2.0, Side::Left, v, unit(c.n / 2)?)
        },
    },
    Case {
        name: "poincare_mathring",
        group: "inequalities",
        run: |c| {
            let held = spec("pow:a=0;terms=1*2,-1*3")?;
            let v = PoincareVariant::Mathring;
            check_poincare(&TestBattery::regular_interval(), &held, 0.5, 1.5, Side::Left, v, unit(c.n / 2)?)
        },
    },
    Case {
        name: "poincare_symmetric",
        group: "inequalities",
        run: |c| {
            let held = spec("pow:a=0;terms=1*2,-1*3")?;
            let v = PoincareVariant::Symmetric;
            check_poincare(&TestBattery::regular_interval(), &held, 0.5, 1.5, Side::Left, v, unit(c.n / 2)?)
        },
    },
    Case {
        name: "sobolev_line",
        group: "inequalities",
        run: |c| {
            let held = spec("gauss:mu=0.2;s=0.9")?;
            let domain = SobolevDomain::Line {
                half_width: 16.0,
                n: (4 * c.n).max(256),
            };
            check_sobolev_inequality(&TestBattery::line_default(), &held, 0.5, 1.5, 6.0, Side::Left, domain)
        },
    },
    Case {
        name: "sobolev_interval",
        group: "inequalities",
        run: |c| {
            let held = spec("pow:a=0;terms=1*2,-1*3")?;
            let domain = SobolevDomain::Interval(unit(c.n / 2)?);
            check_sobolev_inequality(&TestBattery::kernel_interval(), &held, 0.3, 2.0, 5.0, Side::Left, domain)
        },
    },
    Case {
        name: "extend_trivial",
        group: "extensions",
        run: |c| {
            let n = (c.n / 4).max(64);
            let u = sampled("bump:c=0.5;r=0.05", n)?;
            let ambient = Grid::new(-1.0, 17.0, n * 18)?;
            extend_trivial(&u, 0.5, 2.0, Side::Left, ambient).map(|(_, r)| r)
        },
    },
    Case {
        name: "extend_interior",
        group: "extensions",
        run: |c| {
            let u = sampled("pow:a=0;terms=1*1.3", c.n / 4)?;
            extend_interior(&u, 0.5, 1.5, Side::Left, (0.25, 0.75)).map(|(_, r)| r)
        },
    },
    Case {
        name: "extend_exterior",
        group: "extensions",
        run: |c| {
            let u = sampled("const:1", c.n / 4)?;
            extend_exterior(&u, 0.25, 2.0, 5.0, Side::Left).map(|(_, r)| r)
        },
    },
    Case {
        name: "embedding_trace",
        group: "embedding",
        run: |c| {
            let family = TestBattery::trace_default();
            check_embedding_trace(&family, 0.75, 2.0, 0.25, Side::Left, unit(c.n / 4)?)
        },
    },
    Case {
        name: "consistency_w1p",
        group: "embedding",
        run: |c| check_consistency_w1p(&spec("pow:a=0;terms=1*0,1*1")?, 0.5, 1.5, Side::Left, unit(c.n)?),
    },
    Case {
        name: "line_equivalences",
        group: "line",
        run: |c| check_line_equivalences(&TestBattery::line_default(), 0.5, 32.0, (4 * c.n).max(256)),
    },
    Case {
        name: "density_smooth",
        group: "density",
        run: |c| check_density(&spec("bump:c=0.5;r=0.3")?, 0.3, 2.0, Side::Left, DensityMode::Smooth, unit(c.n)?),
    },
    Case {
        name: "density_piecewise",
        group: "density",
        run: |c| {
            let u = spec("step:c=0.5;h=1")?;
            check_density(&u, 0.3, 2.0, Side::Left, DensityMode::PiecewiseConstant, unit(c.n)?)
        },
    },
    Case {
        name: "inclusivity",
        group: "inclusivity",
        run: |c| check_inclusivity(&spec("bump:c=0.5;r=0.3")?, 0.4, 0.7, 2.0, Side::Left, unit(c.n)?),
    },
];

/// Names of the cases in `group` (`all` for every case).
pub fn suite_cases(group: &str) -> Result<Vec<&'static str>> {
    Ok(select(group)?.iter().map(|c| c.name).collect())
}

fn select(group: &str) -> Result<Vec<&'static Case>> {
    if group != "all" && !SUITE_GROUPS.contains(&group) {
        return Err(Error::domain(format!(
            "unknown suite `{group}`; expected all or one of {}",
            SUITE_GROUPS.join(", ")
        )));
    }
    Ok(CASES.iter().filter(|c| group == "all" || c.group == group).collect())
}

/// Runs the cases of `group` (`all` or one of [`SUITE_GROUPS`]); outcomes
/// keep the case order whatever the thread count.
pub fn run_suite(group: &str, config: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    if config.n < 64 || !config.n.is_multiple_of(8) {
        return Err(Error::domain(format!("suite grid size must be a multiple of 8 and at least 64, got {}", config.n)));
    }
    let cases = select(group)?;
    Ok(par::map_slice(&cases, |case| {
        let (report, error) = match (case.run)(config) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        SuiteOutcome {
            case: case.name.to_string(),
            group: case.group.to_string(),
            report,
            error,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_cover_every_case() {
        let all = suite_cases("all").unwrap();
        let mut grouped: Vec<_> = SUITE_GROUPS.iter().flat_map(|g| suite_cases(g).unwrap()).collect();
        grouped.sort();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(grouped, sorted);
        assert!(suite_cases("nope").is_err());
    }

    #[test]
    fn small_groups_pass() {
        for g in ["pairing", "ibp", "inclusivity"] {
            for o in run_suite(g, &SuiteConfig { n: 1024 }).unwrap() {
                assert!(o.passed(), "{}", o.summary());
            }
        }
    }

    #[test]
    fn bad_grid_size() {
        assert!(run_suite("ibp", &SuiteConfig { n: 100 }).is_err());
    }
}
