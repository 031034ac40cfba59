//! Dense order-3 tensor algebra.
//!
//! This crate provides the basic objects shared by the rest of the
//! workspace: a dense real third-order tensor ([`Tensor3`]), a triple of
//! factor matrices representing a canonical polyadic decomposition
//! ([`FactorTriple`]), a deterministic seeded random number generator
//! ([`SeededRng`]), and the elementary operations on them (outer
//! products, modal products, unfoldings, Frobenius geometry, random
//! generation, and SNR-controlled noise).
//!
//! # Storage layout
//!
//! A `Tensor3` with dimensions `(I1, I2, I3)` stores its entries in a
//! single `Vec<f64>` with **mode-1 fastest** ordering: entry `(i, j, k)`
//! lives at linear index `i + I1 * (j + I2 * k)`. All unfoldings and the
//! on-disk file format follow this layout; see [`Tensor3::unfold`] and
//! [`io`] for the exact conventions.

mod error;
mod factor;
pub mod io;
mod rng;
pub mod svd;
mod tensor;

pub use error::CoreError;
pub use factor::FactorTriple;
pub use rng::SeededRng;
pub use tensor::Tensor3;

pub use factor::{add_noise_at_snr, khatri_rao, random_rank_r, synthesize};
pub use svd::{
    leading_left_singular_vectors, min_singular_value, operator_norm, singular_values, RobustSvd,
};
pub use tensor::outer3;
