use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown label: {0}")]
    UnknownLabel(String),

    #[error("label sets overlap on {0}")]
    OverlappingLabels(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unitary set is not randomizing: {0}")]
    NotRandomizing(String),

    #[error("randomizing-set construction failed after {attempts} attempts (last deviation {last_dev:.3e})")]
    RetriesExhausted { attempts: usize, last_dev: f64 },

    #[error("protocol abort: {0}")]
    Abort(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
