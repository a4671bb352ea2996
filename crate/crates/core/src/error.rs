use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: rating {value} outside (0, 10]")]
    RatingOutOfRange { line: u64, value: f64 },

    #[error("dataset contains no ratings")]
    EmptyDataset,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Column-pivoted elimination found no usable pivot.
    #[error("matrix is rank deficient: every remaining pivot fell below {threshold:e} at elimination step {step}")]
    RankDeficient { step: usize, threshold: f64 },

    /// Square Maxvol hit its iteration cap. `indices` is still a valid seed.
    #[error("square maxvol not dominant after {iterations} swaps (max |C_ij| = {max_coefficient})")]
    IterationCap {
        iterations: usize,
        max_coefficient: f64,
        indices: Vec<usize>,
    },

    #[error("truncated SVD did not converge in {iterations} iterations (relative residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("seed Gram matrix is ill-conditioned (condition number {condition:e}); use a smaller seed set or factor-based coefficients")]
    IllConditioned { condition: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
