//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. The variants are coarse on
//! purpose: they map one-to-one onto the process exit codes used by the
//! command-line driver (falsification, budget exhaustion, bad input).

use thiserror::Error;

/// Errors raised by the exact-arithmetic kernels and the verification suites.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad prime, weight outside the cone, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An element or matrix that was required to be invertible is not.
    #[error("not a unit: {0}")]
    NotUnit(String),
    /// The working precision (p-adic modulus, truncation degree, table size)
    /// is too small for the requested computation.
    #[error("insufficient precision: {0}")]
    Precision(String),
    /// A truncated power-series computation left its degree window.
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    /// A configured work budget (model dimension, enumeration count) was exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A mathematical identity that must hold was found to fail.
    #[error("falsified: {0}")]
    Falsified(String),
    /// JSON or textual input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand result type.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code associated with the error class:
    /// 1 for falsification, 2 for budget exhaustion, 3 for input errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Falsified(_) => 1,
            Error::Budget(_) => 2,
            _ => 3,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// Return an [`Error::InvalidInput`] unless `cond` holds.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
