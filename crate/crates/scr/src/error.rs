//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("empty logits")]
    EmptyLogits,
    #[error("degenerate distribution: all entries are zero")]
    DegenerateDistribution,
    #[error("negative entry {value} at index {index} in a nonnegative vector")]
    NegativeEntry { index: usize, value: f64 },
    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("class index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("empty batch")]
    EmptyBatch,
    #[error("beta {0} outside [0, 1)")]
    InvalidBeta(f64),
    #[error("scene {scene}: {what} label {label} out of range for vocabulary of size {size}")]
    LabelOutOfRange {
        scene: usize,
        what: &'static str,
        label: usize,
        size: usize,
    },
    #[error("vocabulary mismatch: model expects {expected} {what} classes, got {actual}")]
    VocabMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("feature width mismatch: expected {expected}, got {actual}")]
    FeatureWidthMismatch { expected: usize, actual: usize },
    #[error("length mismatch between {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("{path}:{line}: malformed scene record: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("checkpoint not found: {0}")]
    CheckpointNotFound(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
