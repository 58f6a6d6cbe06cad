use thiserror::Error;

/// Errors shared by the algebraic modules.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("truncation mismatch: {0} vs {1}")]
    TruncMismatch(usize, usize),

    #[error("scalar mode mismatch (exact vs float)")]
    ModeMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite float coefficient")]
    NonFinite,

    #[error("invalid generator index {0}")]
    BadGenerator(i64),

    #[error("automorphism certificate rejected: {0}")]
    BadCertificate(String),

    #[error("json: {0}")]
    Json(String),
}

impl AlgebraError {
    pub fn pre(msg: impl Into<String>) -> Self {
        AlgebraError::Precondition(msg.into())
    }
}
