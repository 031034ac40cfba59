use thiserror::Error;

/// Errors produced by the JGE operations.
#[derive(Debug, Error)]
pub enum JgeError {
    /// Operand dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Error bubbled up from the core tensor layer.
    #[error(transparent)]
    Core(#[from] tensor_core::CoreError),
}
