use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite sample at {0}")]
    NonFinite(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("loop constraint violated: {0}")]
    Loop(String),

    #[error("algebra: {0}")]
    Algebra(#[from] magnus_core::AlgebraError),

    #[error("io: {0}")]
    Io(String),
}

impl TorusError {
    pub fn pre(msg: impl Into<String>) -> Self {
        TorusError::Precondition(msg.into())
    }
}
