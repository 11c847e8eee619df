use thiserror::Error;

use crate::geometry::ShearIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid index {index}: {reason}")]
    InvalidIndex { index: String, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid size mismatch: system expects {expected}x{expected}, got {got}x{got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("index {0} is not part of the shearlet system")]
    OutOfRange(ShearIndex),

    #[error("support of size {size} exceeds the exhaustive limit {limit}; use the greedy method")]
    Capacity { size: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
