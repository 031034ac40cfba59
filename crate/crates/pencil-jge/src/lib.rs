//! Joint generalized eigenvalue (JGE) machinery for third-order tensors
//! with square frontal slices.
//!
//! A JGE value of a tensor `T` of size `R x R x K` is a one-dimensional
//! subspace `span(λ) ⊂ R^K` for which some nonzero `x` satisfies
//! `T_k x = λ_k y` for all slices `k` and a common vector `y`. For
//! `K = 2` this is the classical generalized eigenvalue problem for the
//! matrix pencil `(T_1, T_2)`, and a simple pencil admits an explicit
//! rank-`R` decomposition through a generalized eigendecomposition of
//! mixed slices (Jennrich's construction). This crate provides:
//!
//! * [`Line`] and [`Spectrum`]: lines in `R^K` and multisets of them;
//! * the characteristic polynomial `det(Σ γ_k T_k)` and a randomized
//!   slice-mix invertibility probe;
//! * [`pencil_spectrum`] / [`jennrich_pencil_cpd`] for `R x R x 2`
//!   pencils;
//! * the chordal metric on lines and the spectral-variation and
//!   matching-distance metrics on spectra.

mod assignment;
mod charpoly;
mod error;
pub mod fixtures;
mod line;
mod metrics;
mod pencil;

pub use charpoly::{char_poly_eval, slice_mix_probe};
pub use error::JgeError;
pub use line::{Line, Spectrum};
pub use metrics::{
    bottleneck_matching_distance, chordal, exhaustive_matching_distance, matching_distance,
    spectral_variation,
};
pub use pencil::{jennrich_pencil_cpd, pencil_spectrum, PencilDiagnosis, PencilVerdict};

/// Default base tolerance used for slice-mix invertibility, eigenvalue
/// realness, and simplicity gaps.
pub const DEFAULT_TOL: f64 = 1e-8;
