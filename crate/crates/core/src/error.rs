use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A requested size exceeds the configured memory or model budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two points were handed to an operation that requires one space.
    #[error("points belong to different spaces")]
    SpaceMismatch,

    /// A point does not belong to the space it was used on.
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// The arc between two points is not unique (graph with cycles).
    #[error("arc between the points is not unique ({candidates} simple paths)")]
    ArcNotUnique { candidates: usize },

    /// A system descriptor tag was not recognized.
    #[error("unknown system tag `{tag}`; known tags: {known}")]
    UnknownTag { tag: String, known: String },

    /// Binary or text deserialization failed.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Wrapper around I/O failures of the dump/load interfaces.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
