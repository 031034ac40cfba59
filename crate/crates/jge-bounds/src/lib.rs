//! Existence and uniqueness certificates for best rank-`R` tensor
//! approximations.
//!
//! The central quantity is a computable radius `epsilon / 2` such that
//! every tensor within that Frobenius distance of a given rank-`R`
//! tensor has a best rank-`R` approximation, and that approximation has
//! a unique canonical polyadic decomposition. The radius is assembled
//! from per-pencil quantities
//! `epsilon_i = sigma_min(A) * sigma_min(B) * min_gap(C) / 2`
//! over disjoint pairs of frontal slices after an orthogonal slice mix,
//! maximized over randomly sampled mixes ([`multi_pencil_epsilon`]).
//! [`mlsvd_existence_check`] extends the certificate to measured
//! (noisy, full-size) tensors through a truncated multilinear SVD.

mod balance;
mod bauer_fike;
mod certify;
mod multi;
mod report;
mod single;

pub use balance::{balance_factors, BalanceMode};
pub use bauer_fike::{bauer_fike_sv_bound, SpecialCase, SvBound};
pub use certify::{certify_neighborhood, mlsvd_existence_check, CertifyOptions};
pub use multi::{multi_pencil_epsilon, multi_pencil_epsilon_over};
pub use report::{BoundReport, MeasuredCertificate, PencilDetail, ReportMeta, Verdict};
pub use single::{matching_distance_bound, pencil_existence_epsilon, ErrorNorm, MdBound};

use thiserror::Error;

/// Default relative tolerance for rank and simplicity decisions.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Errors from certificate computations.
#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Core(#[from] tensor_core::CoreError),
    #[error(transparent)]
    Jge(#[from] pencil_jge::JgeError),
    #[error(transparent)]
    Compress(#[from] tensor_compress::CompressError),
}
