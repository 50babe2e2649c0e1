use core::fmt;

use alloc::string::String;

/// Errors raised by the simulation and detection primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An iterative solver did not reach its tolerance.
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    /// A caller-side contract was broken (empty input, length mismatch, ...).
    InvalidInput(String),
    /// A configuration value is out of its allowed range.
    InvalidConfig(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// True for solver failures as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
