//! Error type shared by every module.

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped so the command-line front end can map them onto
/// its exit codes: configuration problems, numerical failures and
/// bracketing failures are distinguishable.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An operator that must be Hermitian is not.
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    /// Invalid configuration, malformed input or an unusable basis.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical routine failed to converge or lost accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A threshold scan found no sign change in its range.
    #[error("bracketing failure: {0}")]
    Bracketing(String),
    /// A dual certificate failed independent verification.
    #[error("certificate rejected: {0}")]
    Certificate(String),
    /// A witness term cannot be resolved against the data.
    #[error("unresolvable witness label: {0}")]
    UnresolvedLabel(String),
    /// A serialized document does not match the expected schema.
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
