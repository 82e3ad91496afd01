use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("malformed rational: {0:?}")]
    MalformedRational(String),

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("region piece count {pieces} exceeds ceiling {ceiling}")]
    ResourceCeiling { pieces: usize, ceiling: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("strategy returned a point outside the offered move ({offender})")]
    InconsistentStrategy { offender: String },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
