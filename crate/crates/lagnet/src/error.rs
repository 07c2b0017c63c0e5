//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by data handling, training, estimation and output stages.
#[derive(Error, Debug)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column '{name}' not found in header")]
    ColumnNotFound { name: String },

    #[error("duplicate column name '{name}' in schema")]
    DuplicateColumn { name: String },

    #[error("non-numeric cell at line {line}, column '{column}': '{cell}'")]
    NonNumericCell {
        line: usize,
        column: String,
        cell: String,
    },

    #[error("ragged row at line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("csv file has a header but no data rows")]
    EmptyData,

    #[error("series must contain at least one observation")]
    EmptySeries,

    #[error("exogenous channel '{name}' has length {len}, expected {expected}")]
    ExogLengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },

    #[error("invalid lag specification: {0}")]
    InvalidLag(String),

    #[error("max lag {max_lag} must be smaller than series length {len}")]
    LagTooLarge { max_lag: usize, len: usize },

    #[error("invalid train/test split: n_train={n_train}, length={len}")]
    InvalidSplit { n_train: usize, len: usize },

    #[error("differencing order {d} must be smaller than series length {len}")]
    DifferenceTooDeep { d: usize, len: usize },

    #[error("channel '{name}' is degenerate (constant); cannot fit scaler")]
    DegenerateChannel { name: String },

    #[error("invalid parameter '{name}': {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value encountered: {context}")]
    NonFinite { context: String },

    #[error("numeric overflow during gradient evaluation (weight norm {weight_norm:.3e})")]
    GradientOverflow { weight_norm: f64 },

    #[error(
        "training diverged at epoch {epoch} (sse non-finite); try a lower learning rate"
    )]
    Diverged { epoch: usize },

    #[error("all {restarts} restarts diverged; try a lower learning rate")]
    AllRestartsDiverged { restarts: usize },

    #[error("invalid order notation '{text}': {reason}")]
    OrderNotation { text: String, reason: String },

    #[error("series too short: need more than {needed} observations, got {len}")]
    SeriesTooShort { needed: usize, len: usize },

    #[error("objective is not finite at the start point")]
    ObjectiveNotFinite,

    #[error("models are not comparable: {0}")]
    Incomparable(String),

    #[error("no feasible candidate: {0}")]
    NoFeasibleCandidate(String),

    #[error("forecast requires {what} over the horizon")]
    MissingHorizonData { what: String },

    #[error("insufficient history: need at least {needed} observations, got {len}")]
    InsufficientHistory { needed: usize, len: usize },
}
