//! Executable checks: each one computes both sides of an identity or
//! inequality on test functions and reports residuals and ratios.

mod density;
mod embedding;
mod extension;
mod inclusivity;
mod inequalities;
mod line;
mod pairing;
mod report;
mod suite;

pub use density::{check_density, DensityMode, CELL_COUNTS, DENSITY_TOL, MOLLIFIER_LEVELS};
pub use embedding::{check_consistency_w1p, check_embedding_trace, SHARPNESS_OFFSET};
pub use extension::{extend_exterior, extend_interior, extend_trivial, COPY_TOL, SLOPE_TOL, TAIL_TOL};
pub use inclusivity::{check_inclusivity, INCLUSIVITY_TOL};
pub use inequalities::{
    check_poincare, check_sobolev_inequality, PoincareVariant, SobolevDomain, DILATIONS, HELD_OUT_FACTOR,
    REGULARITY_TOL, SCALING_DRIFT, STABILITY_DRIFT,
};
pub use line::{check_line_equivalences, gagliardo_spectral_constant, BAND_SPREAD, MARCHAUD_SLACK, SPECTRAL_TOL};
pub use pairing::{check_ftwfc, check_ibp, check_weak_pairing, Candidate, IbpVariant};
pub use suite::{run_suite, suite_cases, SuiteConfig, SuiteOutcome, DEFAULT_N, SUITE_GROUPS};
pub use report::{ReportInputs, TestBattery, VerificationReport, REPORT_VERSION};
