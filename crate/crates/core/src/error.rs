//! Error types shared across the workspace.

use thiserror::Error;

/// Errors produced by the search space, simulator, surrogate, and search layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A genome slot is outside its searchable range or malformed.
    #[error("invalid genome at slot {slot}: value {value} ({reason})")]
    InvalidGenome {
        slot: usize,
        value: f64,
        reason: String,
    },

    /// An architecture violates a search-space invariant.
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    /// Drift was requested before the programming reference time.
    #[error("invalid time: t = {t} s is before t0 = {t0} s")]
    InvalidTime { t: f64, t0: f64 },

    /// Matrix or vector dimensions do not line up.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeError { expected: String, got: String },

    /// A fitness backend failed for a specific architecture.
    #[error("evaluation failed for {arch_id}: {reason}")]
    EvalError { arch_id: String, reason: String },

    /// Surrogate training could not proceed.
    #[error("training error: {0}")]
    TrainError(String),

    /// Feature vectors do not match the model's schema.
    #[error("schema mismatch: {0}")]
    SchemaError(String),

    /// No individual ever satisfied both search constraints.
    #[error("infeasible search: {0}")]
    InfeasibleSearch(String),

    /// Exhaustive enumeration was requested for a space above its cap.
    #[error("subspace too large: {size} architectures exceeds cap {cap}")]
    SubspaceTooLarge { size: u128, cap: u64 },

    /// Malformed configuration value.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
