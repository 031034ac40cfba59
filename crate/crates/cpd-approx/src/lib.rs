//! Rank-R CPD fitting and rank-1 / spectral-norm estimation.
//!
//! [`cpd_als`] fits a rank-`R` canonical polyadic decomposition by plain
//! alternating least squares with random restarts; [`best_rank1_hopm`]
//! runs higher-order power iteration to a stationary rank-1
//! approximation, whose Frobenius norm is a *lower* bound on the tensor
//! spectral norm; [`spectral_norm_bounds`] sandwiches the spectral norm
//! between that lower bound and the smallest unfolding operator norm.

mod als;
mod hopm;

pub use als::{cpd_als, AlsOptions, FitResult};
pub use hopm::{best_rank1_hopm, spectral_norm_bounds, Rank1Fit, SpectralNormBounds};

pub(crate) use tensor_core::operator_norm;
