use alloc::string::String;

/// Errors produced by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid proximity matrix at ({row}, {col}): {reason}")]
    Matrix {
        row: usize,
        col: usize,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("class counts must not both be zero")]
    EmptyNode,

    #[error("split does not conserve parent counts: {0}")]
    Conservation(String),

    #[error("degenerate feature range: min = max = {0}")]
    DegenerateFeature(f64),

    #[error("sequence must not be empty")]
    EmptySequence,

    #[error("feature count mismatch: expected {expected}, found {found}")]
    FeatureMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("invalid cluster ranges: {0}")]
    Ranges(String),

    #[error("classification: {0}")]
    Classify(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
