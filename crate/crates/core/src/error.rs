use thiserror::Error;

/// Errors shared across the model, network-builder, bound, and sensing layers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("latent point outside the model domain: {0}")]
    DomainViolation(String),

    #[error("signal is not compatible with the group-sparse structure: {0}")]
    NotGroupSparse(String),

    #[error("enumeration size {size} exceeds cap {cap}")]
    EnumerationCap { size: u128, cap: u128 },

    #[error("operation undefined here: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
