//! Grids, sampled functions and the low-level numerical kernels shared by
//! every other module.

pub(crate) mod fourier;
mod function;
mod gamma;
mod grid;
pub mod quad;
mod weights;

pub use fourier::{discrete_fourier, fractional_multiplier, inverse_fourier, Spectrum};
pub use function::{FracOrder, LineFunction, SampledFunction, Side, Singular};
pub use gamma::{gamma_fn, rgamma};
pub use grid::{uniform_grid, Grid};
pub use weights::{gl_weights, l1_weights, product_trapezoid_coeffs, singular_quadrature_weights};
