use thiserror::Error;

use crate::group::FiniteAbelianGroup;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch {
        expected: FiniteAbelianGroup,
        found: FiniteAbelianGroup,
    },

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is undefined for the zero vector")]
    ZeroVector(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed descriptor: {0}")]
    MalformedDescriptor(String),

    #[error("unsupported descriptor version {0}")]
    UnsupportedVersion(u8),

    #[error("unknown system label `{0}`")]
    UnknownSystem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
