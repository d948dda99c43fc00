use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value at sample {index}")]
    NonFiniteValue { index: usize },

    #[error("timestamps must strictly increase (violation at sample {index})")]
    NonMonotoneTimestamps { index: usize },

    #[error("zero spatial value at sample {index} (excluded from U*)")]
    ZeroValue { index: usize },

    #[error("timestamp {timestamp} not present on the grid")]
    OffGridTimestamp { timestamp: f64 },

    #[error("grid must be strictly ascending and non-empty")]
    InvalidGrid,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("series or sequence must be nonempty")]
    EmptyInput,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("family member {index} is linearly dependent on its predecessors")]
    DependentFamily { index: usize },

    #[error("token {token:?} is out of vocabulary")]
    OutOfVocabulary { token: String },

    #[error("zero self-product: cosine undefined")]
    ZeroSelfProduct,

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("ragged rows: line {line} has {got} values, expected {expected}")]
    RaggedRows { line: usize, got: usize, expected: usize },

    #[error("bad index file: {0}")]
    BadIndexFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
