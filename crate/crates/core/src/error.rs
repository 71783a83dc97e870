//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Coarse classification of an error, used by callers (notably the CLI)
/// to decide exit codes: input problems are distinguishable from
/// runtime/numerical failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input file, schema, or configuration is invalid.
    Input,
    /// The computation itself failed (degenerate data, numerics, I/O).
    Runtime,
}

#[derive(Debug, Error)]
pub enum Error {
    /// Header/schema problems: missing or duplicate columns, no score columns.
    #[error("input schema error: {0}")]
    InputSchema(String),

    /// A cell that should be numeric could not be parsed. Row numbers are
    /// 1-based data rows (the header is row 0).
    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    /// A label value that is not part of the class vocabulary.
    #[error("label '{label}' at row {row} is not among the score columns")]
    LabelVocabulary { row: usize, label: String },

    /// Structural validation failures: non-finite values, empty fields,
    /// too few rows, weights off the simplex.
    #[error("validation error: {0}")]
    Validation(String),

    /// Invalid run configuration (replicate count, confidence level, grid size).
    #[error("config error: {0}")]
    Config(String),

    /// Datasets that cannot be compared against each other.
    #[error("comparability error: {0}")]
    Comparability(String),

    /// Fewer samples than the estimator requires.
    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Matrix dimension or symmetry mismatch.
    #[error("shape error: {0}")]
    Shape(String),

    /// Numerical failure (eigendecomposition, non-positive spectrum).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Input whose moments carry no usable signal (e.g. all variances zero).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The univariate Gini index is undefined (mean too close to zero).
    #[error("Gini index undefined for column {column}: {message}")]
    UndefinedGini { column: usize, message: String },

    /// All whitened means are zero, so no class weights exist.
    #[error("class weights undefined: all whitened means are zero")]
    UndefinedWeights,

    /// A one-vs-rest problem with no positives or no negatives.
    #[error("empty class '{class}': {message}")]
    EmptyClass { class: String, message: String },

    /// Every class was empty; nothing can be computed.
    #[error("no signal: {0}")]
    NoSignal(String),

    /// Function argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bootstrap resampling could not produce enough usable replicates.
    #[error("bootstrap error: {0}")]
    Bootstrap(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// The module an error originates from, for diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InputSchema(_)
            | Error::Parse { .. }
            | Error::LabelVocabulary { .. }
            | Error::Validation(_) => "dataset",
            Error::Config(_) | Error::Comparability(_) => "cli",
            Error::InsufficientData { .. }
            | Error::Shape(_)
            | Error::Numerical(_)
            | Error::DegenerateInput(_) => "whitening",
            Error::UndefinedGini { .. } | Error::UndefinedWeights | Error::Domain(_) => "gini",
            Error::EmptyClass { .. } | Error::NoSignal(_) => "roc",
            Error::Bootstrap(_) => "bootstrap",
            Error::Io { .. } => "report",
        }
    }

    /// Which broad class this error belongs to.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InputSchema(_)
            | Error::Parse { .. }
            | Error::LabelVocabulary { .. }
            | Error::Validation(_)
            | Error::Config(_)
            | Error::Comparability(_)
            | Error::InsufficientData { .. } => ErrorClass::Input,
            _ => ErrorClass::Runtime,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
