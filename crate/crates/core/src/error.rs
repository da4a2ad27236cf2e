use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A user-supplied parameter is outside its domain.
    #[error("{message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("mode name collision: {0}")]
    ModeCollision(String),

    #[error("unknown quadrature label: {0}")]
    UnknownLabel(String),

    #[error("invalid quadrature ordering: {0}")]
    InvalidOrdering(String),

    #[error("target ordering is not a permutation of the source ordering")]
    NotAPermutation,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("matrix is not symplectic (residual |S Omega S^T - Omega| = {residual:e})")]
    NotSymplectic { residual: f64 },

    #[error("operation requires a full (non-reduced) quadrature ordering")]
    ReducedOrdering,

    #[error("covariance is singular or not positive definite (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("optimizer did not converge after {iterations} iterations (best g = ({}, {}))", best.0, best.1)]
    NonConvergence { iterations: usize, best: (f64, f64) },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            message: message.into(),
        }
    }

    /// True for errors caused by bad input, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Singular { .. } | Error::NonConvergence { .. } | Error::NotSymplectic { .. }
        )
    }
}
