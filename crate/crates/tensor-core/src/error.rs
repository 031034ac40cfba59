use thiserror::Error;

/// Errors produced by the core tensor operations.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Dimensions of the operands are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// I/O failure while reading or writing a tensor file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A tensor file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}
