use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,
    #[error("the set is empty")]
    EmptySet,
    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),
    #[error("unsupported decomposition: {0}")]
    UnsupportedDecomposition(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invalid map: {}", .0.join("; "))]
    InvalidMap(Vec<String>),
    #[error("descriptor mismatch: {0}")]
    Mismatch(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Singular => "Singular",
            Error::EmptySet => "EmptySet",
            Error::UnsupportedRing(_) => "UnsupportedRing",
            Error::UnsupportedDecomposition(_) => "UnsupportedDecomposition",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::InvalidMap(_) => "InvalidMap",
            Error::Mismatch(_) => "Mismatch",
            Error::Shape(_) => "Shape",
            Error::TooLarge(_) => "TooLarge",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
