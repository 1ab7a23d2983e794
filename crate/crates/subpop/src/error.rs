//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors raised by configuration validation, operators, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter lies outside its admissible range.
    #[error("parameter `{name}` = {value} outside admissible range {range}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Vectors that must share a length do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// An interaction matrix row is neither a probability distribution nor all zero.
    #[error("interaction matrix row {row} sums to {sum}, expected 1 (or all zeros)")]
    BadMatrixRow { row: usize, sum: f64 },

    /// A size-ratio vector does not describe a valid partition.
    #[error("size ratios {reason}")]
    BadSizeVector { reason: String },

    /// A restricted-mating topology produced an isolated individual.
    #[error("restricted mating radius {sigma} isolates individual {index}")]
    IsolatedIndividual { sigma: f64, index: usize },

    /// Problem family rejected the requested instance.
    #[error("invalid problem instance: {0}")]
    BadInstance(String),

    /// The novelty archive outgrew its configured hard cap.
    #[error("novelty archive exceeded cap of {cap} entries (n_min = {n_min:.6e}); threshold dynamics likely diverged")]
    ArchiveOverflow { cap: usize, n_min: f64 },

    /// An operation needed evaluated solutions but found an unevaluated one.
    #[error("solution at position {index} has no objective vector")]
    Unevaluated { index: usize },

    /// An operation received an empty set it cannot handle.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Evaluation budget exhausted mid-run.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: u64 },

    /// Experiment plan or result file could not be parsed.
    #[error("parse error in {what} line {line}: {reason}")]
    Parse {
        what: String,
        line: usize,
        reason: String,
    },

    /// Underlying I/O failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
