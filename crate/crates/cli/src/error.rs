//! Command errors and their exit codes.

use std::fmt;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A mathematical check failed.
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    /// An eigensolver did not converge.
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    /// Wraps a library error with the config path that produced it.
    pub fn from_core(context: &str, err: obslab::Error) -> Self {
        CliError {
            code: if err.is_numerical() { exit::NUMERICAL } else { exit::USAGE },
            message: format!("{context}: {err}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
