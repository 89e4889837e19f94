use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("not a vertex of the assignment polytope: {0}")]
    NotAVertex(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("empty instance: size must be at least 1")]
    EmptyInstance,

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("enumeration refused: {0}")]
    EnumerationRefused(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
