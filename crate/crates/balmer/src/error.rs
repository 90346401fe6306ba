use thiserror::Error;

/// Errors surfaced by the engine. The CLI maps `Schema`, `Precondition` and
/// `Usage` to exit code 2, failed checks (which are ordinary report data, not
/// errors) to exit code 1.
#[derive(Debug, Error)]
pub enum EngineError {
    /// Malformed input data: unknown labels, partial fusion tables, bad JSON shapes.
    #[error("schema error: {0}")]
    Schema(String),
    /// An operation was called outside its contract (non-radical ideal, shared
    /// variables in a tensor product, mismatched chain endpoints, ...).
    #[error("precondition error: {0}")]
    Precondition(String),
    /// Input exceeds a configured enumeration cap.
    #[error("resource error: {0}")]
    Resource(String),
    /// An internal cross-check that should hold for every valid input failed.
    /// Seeing this means a bug, not bad input.
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, EngineError>;

pub(crate) fn schema(msg: impl Into<String>) -> EngineError {
    EngineError::Schema(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> EngineError {
    EngineError::Precondition(msg.into())
}

pub(crate) fn resource(msg: impl Into<String>) -> EngineError {
    EngineError::Resource(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> EngineError {
    EngineError::Internal(msg.into())
}
