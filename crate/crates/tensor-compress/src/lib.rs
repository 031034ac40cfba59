//! Orthogonal tensor compression.
//!
//! [`mlsvd_truncate`] projects a tensor onto the top left singular
//! subspaces of its three unfoldings (truncated multilinear SVD),
//! producing a small core plus column-orthonormal mode factors.
//! [`orthogonal_procrustes`] solves the classical matrix alignment
//! problem with a subspace-aligned completion, and
//! [`procrustes_pair_compress`] jointly compresses a pair of tensors so
//! that their Frobenius distance does not increase.

mod compression;
mod procrustes;

pub use compression::{mlsvd_truncate, Compression};
pub use procrustes::{orthogonal_procrustes, procrustes_pair_compress, PairCompression};

use thiserror::Error;

/// Errors from compression operations.
#[derive(Debug, Error)]
pub enum CompressError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rank precondition violated: {0}")]
    RankViolation(String),
}
