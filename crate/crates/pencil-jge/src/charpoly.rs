//! Characteristic polynomial evaluation and the randomized slice-mix
//! invertibility probe.

use nalgebra::DVector;
use tensor_core::{SeededRng, Tensor3};

use crate::JgeError;

fn require_square(t: &Tensor3) -> Result<(), JgeError> {
    let (i1, i2, _) = t.dims();
    if i1 != i2 {
        return Err(JgeError::DimensionMismatch(format!(
            "square frontal slices required, got {i1}x{i2}"
        )));
    }
    Ok(())
}

/// Evaluate the characteristic polynomial `p_T(γ) = det(Σ_k γ_k T_k)`.
pub fn char_poly_eval(t: &Tensor3, gamma: &DVector<f64>) -> Result<f64, JgeError> {
    require_square(t)?;
    let mix = t.slice_mix(gamma)?;
    Ok(mix.determinant())
}

/// Randomized probe for slice-mix invertibility.
///
/// Samples `trials` unit Gaussian mixing vectors `v` and accepts the first
/// with `σ_min(Σ_k v_k T_k) > tol * |T|_F`, returning it as a witness.
/// For a slice-mix-invertible tensor the set of failing mixes has measure
/// zero, so failure across all trials is overwhelming evidence that the
/// characteristic polynomial is identically zero.
pub fn slice_mix_probe(
    t: &Tensor3,
    rng: &mut SeededRng,
    trials: usize,
    tol: f64,
) -> Result<(bool, Option<DVector<f64>>), JgeError> {
    require_square(t)?;
    let scale = t.frobenius_norm();
    if scale == 0.0 {
        return Ok((false, None));
    }
    for _ in 0..trials.max(1) {
        let v = rng.normal_vector(t.dim(3)).normalize();
        let mix = t.slice_mix(&v)?;
        let sigma_min = tensor_core::min_singular_value(&mix);
        if sigma_min > tol * scale {
            return Ok((true, Some(v)));
        }
    }
    Ok((false, None))
}
