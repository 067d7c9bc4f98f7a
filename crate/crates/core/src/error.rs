use thiserror::Error;

/// Errors raised across the library. Each variant maps to one class of
/// failure so the CLI and the C ABI can translate them into stable codes.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or function outside the declared domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numeric parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The request exceeds an enumeration or memory guard.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// Incompatible states, pictures or dimensions.
    #[error("model error: {0}")]
    Model(String),
    /// Malformed input that failed a structural or numerical check.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
