//! Weak fractional calculus on intervals and on the real line.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: grids, sampled functions, the Gamma function, singular
//!   quadrature weights and the discrete Fourier transform.
//! * [`oracle`]: exact Riemann-Liouville calculus on a closed family of power
//!   sums and steps, plus a high-resolution spectral reference for Gaussians.
//! * [`operators`]: numerical fractional integrals and derivatives (product
//!   integration, Grünwald-Letnikov, Caputo, Marchaud, spectral), the kernel
//!   functions and the endpoint constant of the kernel decomposition.
//! * [`spaces`]: Lebesgue, one-sided, symmetric, zero-trace, Gagliardo and
//!   Fourier norms, traces and Hölder quotients.
//! * [`verifier`]: executable checks that compute both sides of each
//!   identity or inequality and report residuals.
//!
//! Every sampled function is interpreted as its piecewise-linear interpolant.

pub mod error;
pub mod numerics;
pub mod operators;
pub mod oracle;
pub(crate) mod par;
pub mod spaces;
pub mod verifier;

pub use error::{Error, Result};
pub use numerics::{
    discrete_fourier, gamma_fn, gl_weights, singular_quadrature_weights, uniform_grid, FracOrder,
    Grid, LineFunction, SampledFunction, Side, Singular, Spectrum,
};
pub use operators::{OperatorSpec, Realization};
pub use oracle::{ClosedForm, FunctionSpec};
pub use spaces::{NormFamily, NormSpec};
pub use verifier::{TestBattery, VerificationReport};
