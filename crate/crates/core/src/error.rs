use thiserror::Error;

use crate::maxvol::SelectionResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is numerically rank deficient: pivot {pivot:e} at step {step} is below tolerance {threshold:e}")]
    RankDeficient { step: usize, pivot: f64, threshold: f64 },

    /// The swap loop ran out of iterations. The last iterate is kept so
    /// callers can still use it.
    #[error("iteration limit of {max_iters} reached before convergence")]
    IterationLimit { max_iters: usize, result: Box<SelectionResult> },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("exhaustive search over {count} subsets exceeds the limit of {limit}")]
    CombinatorialLimit { count: u128, limit: u128 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("dataset contains no ratings")]
    EmptyDataset,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for failures of the numerical kernels as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::RankDeficient { .. } | Error::IterationLimit { .. } | Error::CombinatorialLimit { .. })
    }
}
