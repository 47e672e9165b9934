//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two patterns (or a matrix and a pattern) disagree on 2-D shape.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// A flat length does not match what the operation requires.
    #[error("length mismatch: expected {expected} elements, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// An input with zero variance reached a correlation; the caller
    /// decides the fallback.
    #[error("degenerate variance: {0}")]
    DegenerateVariance(&'static str),

    /// Configuration rejected before any work starts.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A scalar parameter is outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request would exceed a hard capacity limit (e.g. exhaustive
    /// enumeration over too many inputs).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    /// A value violates a type invariant (e.g. mask bit not 0/1).
    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file does not conform to its declared format.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
