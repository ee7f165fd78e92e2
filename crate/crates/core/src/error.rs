use alloc::string::String;
use core::fmt;

/// Errors produced by the exact toolkit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Matrix dimensions do not fit the requested operation.
    Dimension(String),
    /// A matrix fails a structural precondition (e.g. skew-symmetry).
    Validation(String),
    /// Signature arity does not match the incident edge count.
    Arity { expected: usize, got: usize },
    /// An enumeration would exceed the configured budget. Never truncated
    /// silently; callers must raise the budget explicitly.
    Budget(String),
    /// Malformed graph, gate or instance data.
    Malformed(String),
    /// An exact identity that the construction guarantees failed to hold.
    InvariantViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(s) => write!(f, "dimension error: {s}"),
            Error::Validation(s) => write!(f, "validation error: {s}"),
            Error::Arity { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            Error::Budget(s) => write!(f, "enumeration budget exceeded: {s}"),
            Error::Malformed(s) => write!(f, "malformed input: {s}"),
            Error::InvariantViolation(s) => write!(f, "invariant violation: {s}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
