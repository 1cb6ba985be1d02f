use thiserror::Error;

#[derive(Debug, Error)]
pub enum QcError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("resource limit: {what} = {size} exceeds cap {cap}")]
    ResourceLimit { what: String, size: usize, cap: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unreachable branch: {0}")]
    UnreachableBranch(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for QcError {
    fn from(e: serde_json::Error) -> Self {
        QcError::Serde(e.to_string())
    }
}

impl From<csv::Error> for QcError {
    fn from(e: csv::Error) -> Self {
        QcError::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QcError>;

/// Fails with [`QcError::InvalidParameter`] unless `cond` holds.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(QcError::InvalidParameter(msg()))
    }
}
