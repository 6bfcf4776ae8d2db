use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("kernels live on different partitions; re-express them with common_refinement first")]
    PartitionMismatch,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("instance too large for brute force: {0} part assignments (limit {1})")]
    TooLarge(f64, f64),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
