//! Crate-wide error type.

use std::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CdfError>;

/// Errors produced by loaders, trainers and the evaluation harness.
#[derive(Debug)]
pub enum CdfError {
    /// Underlying I/O failure (file missing, unreadable, ...).
    Io(std::io::Error),
    /// Malformed input file (CSV/ARFF/model JSON); message names the cause.
    Parse(String),
    /// Structurally invalid data (empty, non-finite values, label mismatch).
    InvalidData(String),
    /// Hyper-parameter or protocol value outside its domain.
    InvalidConfig(String),
    /// Vector/matrix shapes disagree.
    DimensionMismatch { expected: usize, actual: usize },
    /// Operation requires at least two classes.
    SingleClass,
    /// A split left the test side empty.
    EmptyTestSplit,
    /// Network retrieval failed (fetch subcommand only).
    Network(String),
}

impl fmt::Display for CdfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CdfError::Io(e) => write!(f, "io error: {e}"),
            CdfError::Parse(msg) => write!(f, "parse error: {msg}"),
            CdfError::InvalidData(msg) => write!(f, "invalid data: {msg}"),
            CdfError::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            CdfError::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            CdfError::SingleClass => write!(f, "CSS undefined for single class"),
            CdfError::EmptyTestSplit => write!(f, "split produced an empty test set"),
            CdfError::Network(msg) => write!(f, "network error: {msg}"),
        }
    }
}

impl std::error::Error for CdfError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CdfError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for CdfError {
    fn from(e: std::io::Error) -> Self {
        CdfError::Io(e)
    }
}

impl From<csv::Error> for CdfError {
    fn from(e: csv::Error) -> Self {
        CdfError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for CdfError {
    fn from(e: serde_json::Error) -> Self {
        CdfError::Parse(e.to_string())
    }
}
