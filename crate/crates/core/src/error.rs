use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Arguments outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    /// The operation is not defined for this kind of input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A hypothesis of the identity or inequality being checked is violated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("endpoint extrapolation did not converge (c = {value}, spread = {spread})")]
    Extrapolation { value: f64, spread: f64 },

    #[error("Hölder quotient not stable under refinement ({coarse} -> {fine})")]
    Unstable { coarse: f64, fine: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
