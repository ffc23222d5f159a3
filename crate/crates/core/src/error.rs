use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integer result does not fit in 64 bits.
    #[error("overflow: {0}")]
    Overflow(String),
    /// An integral or series that the operation needs does not converge.
    #[error("divergence: {0}")]
    Divergence(String),
    /// A precondition on the shape or structure of the input was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The input is valid but not handled by this routine.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Divergence(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
