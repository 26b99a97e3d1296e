//! Exact fractional calculus on power sums and steps, and a spectral
//! reference for Gaussians on the line.

mod calculus;
mod form;
mod grammar;
mod spectral;

pub use calculus::{oracle_frac_derivative, oracle_frac_integral, DerivativeKind};
pub use form::{Atom, ClosedForm};
pub use grammar::FunctionSpec;
pub use spectral::{
    gaussian_spectral_reference, spectral_reference, REFERENCE_BOX, REFERENCE_LOG2_N,
};
