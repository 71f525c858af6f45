//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors produced by dataset handling, training, calibration and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller violated an operation precondition (dimension mismatch,
    /// out-of-range parameter, malformed argument combination).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The dataset does not support the requested operation, e.g. a
    /// non-binary dataset on the probabilistic path.
    #[error("unsupported dataset: {0}")]
    UnsupportedDataset(String),

    /// A class count degenerates a formula (empty class, single-class split,
    /// all-positive accuracy denominator).
    #[error("degenerate class: {0}")]
    DegenerateClass(String),

    /// A data file could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A persisted model document is malformed, truncated or has an
    /// unsupported format version.
    #[error("model document error: {0}")]
    ModelDocument(String),

    /// An optimizer aborted, typically because the objective returned a
    /// non-finite value.
    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
