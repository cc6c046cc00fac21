use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Negative time passed to a covariance evaluation.
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("covariance matrix is not positive definite even with jitter {jitter:e} (n = {size})")]
    IllConditionedCovariance { size: usize, jitter: f64 },

    /// A coarse grid point has no exact counterpart on the fine grid.
    #[error("grid mismatch: coarse time {0} is not a point of the fine grid")]
    GridMismatch(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
