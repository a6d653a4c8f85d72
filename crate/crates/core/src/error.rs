use thiserror::Error;

use crate::model::Plane;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("plane mismatch: expected {expected:?}, got {actual:?}")]
    PlaneMismatch { expected: Plane, actual: Plane },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("period ratio mismatch on {plane:?}: {n1} steps vs {n2} surface periods (relative residual {residual:.3e})")]
    RatioMismatch {
        plane: Plane,
        n1: usize,
        n2: usize,
        residual: f64,
    },

    #[error("not stabilizable: spectral radius {spectral_radius} >= 1")]
    NotStabilizable { spectral_radius: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
