use thiserror::Error;

/// Errors raised by the library.
///
/// [`Error::kind`] groups the variants into the three classes the command
/// line front end maps onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("context mismatch: q={left} vs q={right}")]
    ContextMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not a vertex of the Farey graph")]
    NotAVertex(String),

    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(String, String),

    #[error("vertices are equal or adjacent; {0}")]
    EqualOrAdjacent(&'static str),

    #[error("operation is not supported for q={q}: {reason}")]
    Unsupported { q: String, reason: &'static str },

    #[error("empty coefficient sequence")]
    EmptySequence,

    #[error("the point at infinity has no finite expansion")]
    InfiniteTarget,

    #[error("the continued fraction has value infinity")]
    InfiniteValue,

    #[error("invalid index {index} for a continued fraction of length {len}: {reason}")]
    InvalidIndex {
        index: usize,
        len: usize,
        reason: &'static str,
    },

    #[error("pattern not present: {0}")]
    PatternNotPresent(String),

    #[error("coefficient does not fit in 64 bits: {0}")]
    CoefficientOverflow(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
