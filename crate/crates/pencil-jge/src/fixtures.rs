//! Hand-constructed fixture tensors with known JGE structure, shared by
//! tests across the workspace.

use nalgebra::{DMatrix, DVector};
use tensor_core::Tensor3;

/// A `3 x 3 x 3` tensor of full multilinear rank whose characteristic
/// polynomial is identically zero — every mix of frontal slices is
/// singular, so the tensor is not slice mix invertible (its border rank
/// is 3 but its rank exceeds 3).
pub fn degenerate_charpoly_tensor() -> Tensor3 {
    let t1 = DMatrix::from_row_slice(3, 3, &[
        1.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, //
        0.0, 0.0, 1.0,
    ]);
    let t2 = DMatrix::from_row_slice(3, 3, &[
        0.0, 2.0, 0.0, //
        0.0, 0.0, -2.0, //
        0.0, 0.0, 0.0,
    ]);
    let t3 = DMatrix::from_row_slice(3, 3, &[
        0.0, 0.0, -1.0, //
        0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0,
    ]);
    Tensor3::from_slices(&[t1, t2, t3]).unwrap()
}

/// A slice-mix-invertible `3 x 3 x 3` tensor with unit-triangular-like
/// slices whose characteristic polynomial factors into the linear forms
/// `(γ1 + γ2 + γ3)(γ1 + 2γ2 + 3γ3)(γ1 - γ2 + 5γ3)`; its three JGE values
/// are the spans of `(1,1,1)`, `(1,2,3)`, and `(1,-1,5)`, the first two
/// of which have no JGE vector (zero geometric multiplicity).
pub fn unit_triangular_factor_tensor() -> Tensor3 {
    let t1 = DMatrix::from_row_slice(3, 3, &[
        1.0, 0.0, 0.0, //
        1.0, 1.0, 0.0, //
        3.0, 4.0, 1.0,
    ]);
    let t2 = DMatrix::from_row_slice(3, 3, &[
        1.0, 0.0, 0.0, //
        1.0, 2.0, 0.0, //
        4.0, 5.0, -1.0,
    ]);
    let t3 = DMatrix::from_row_slice(3, 3, &[
        1.0, 0.0, 0.0, //
        5.0, 3.0, 0.0, //
        7.0, 8.0, 5.0,
    ]);
    Tensor3::from_slices(&[t1, t2, t3]).unwrap()
}

/// The factored characteristic polynomial of
/// [`unit_triangular_factor_tensor`], evaluated at `γ`.
pub fn unit_triangular_factor_charpoly(gamma: &DVector<f64>) -> f64 {
    let (g1, g2, g3) = (gamma[0], gamma[1], gamma[2]);
    (g1 + g2 + g3) * (g1 + 2.0 * g2 + 3.0 * g3) * (g1 - g2 + 5.0 * g3)
}
