use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:.6e} with error {error:.3e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },
    /// A floating-point failure (singular system, NaN, overflow).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// The problem specification cannot be handled by the requested operation.
    #[error("invalid problem: {0}")]
    Spec(String),
    /// Mismatched inputs to a comparison or pipeline.
    #[error("usage error: {0}")]
    Usage(String),
    /// Malformed problem document.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
