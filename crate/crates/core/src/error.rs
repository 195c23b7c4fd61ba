use std::fmt::Display;

use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants map onto the process exit codes of the command line front
/// end: parameter and precondition problems are usage errors, numerical
/// failures are reported separately.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        expected: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure in {what} (residual {residual:.3e})")]
    Numerical { what: String, residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl Display, expected: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            expected: expected.into(),
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for failures of an iterative or dense eigensolver.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
