use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid outcome {outcome} for a tree with {vertices} vertices")]
    InvalidOutcome { outcome: String, vertices: usize },

    #[error("merge width {m} does not divide tree size {vertices}")]
    MergeArity { m: usize, vertices: usize },

    #[error("block instrumentation: {0}")]
    Instrumentation(String),

    #[error("clustering coefficient undefined: no adjacent half-edge pairs")]
    UndefinedClustering,

    #[error("invalid forest: {0}")]
    InvalidForest(String),

    #[error("enumeration horizon {requested} exceeds cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("at least 2 replicates are required, got {0}")]
    InsufficientReplicates(usize),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
