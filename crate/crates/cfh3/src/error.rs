//! Error type shared across the crate.
//!
//! Every fallible operation in this crate returns [`Error`]. The variants
//! mirror the distinct failure modes a caller may want to branch on:
//! resource budgets, containment overflow during tower ascent, incompatible
//! shear fields in exact multi-intersections, stochastic generation that
//! exhausted its retry budget, and plain configuration/serialization issues.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A region operation would exceed the configured piece budget.
    #[error("piece budget exceeded: {actual} pieces requested, budget is {budget}")]
    BudgetExceeded {
        /// Number of pieces the operation would have produced.
        actual: usize,
        /// Configured ceiling.
        budget: usize,
    },

    /// A translated or refined cylinder does not fit inside any tower level
    /// up to the configured maximum.
    #[error("cylinder escapes every tower level up to {max_level}: {context}")]
    Overflow {
        /// Highest level that was tried.
        max_level: usize,
        /// Human-readable description of the offending operation.
        context: String,
    },

    /// An exact k-way intersection was requested across regions whose shear
    /// fields genuinely differ on a set of positive volume.
    #[error("incompatible shear fields in exact multi-intersection: {context}")]
    ShearMismatch {
        /// Human-readable description of the mismatch.
        context: String,
    },

    /// A stochastic search (e.g. a spacer-map draw) failed its statistical
    /// test on every retry.
    #[error("stochastic generation failed after {attempts} attempts: best statistic {best_stat} exceeds tolerance {tolerance}")]
    GenerationFailed {
        /// Number of full attempts made.
        attempts: usize,
        /// Best (smallest) test statistic seen across attempts.
        best_stat: f64,
        /// Tolerance the statistic had to meet.
        tolerance: f64,
    },

    /// A recorded schedule content hash does not match the schedule it was
    /// presented with — a cylinder used against the wrong tower, or a
    /// schedule artifact whose recorded hash disagrees with its content.
    #[error("schedule hash mismatch: expected {expected}, got {actual}")]
    HashMismatch {
        /// The recorded hash.
        expected: String,
        /// Hash of the content actually supplied.
        actual: String,
    },

    /// A representation from the infinite-dimensional family was requested
    /// at the excluded zero frequency of the centre.
    #[error("centre frequency must be nonzero")]
    GammaZero,

    /// Invalid configuration or arguments.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A structural validation check failed.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Serialization or deserialization failure.
    #[error("serialization error: {0}")]
    Serde(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
