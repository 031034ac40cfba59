//! Spectral-variation bound of Bauer-Fike type.

use cpd_approx::spectral_norm_bounds;
use serde::{Deserialize, Serialize};
use tensor_core::{FactorTriple, RobustSvd, SeededRng, Tensor3};

use crate::BoundsError;

/// Structural special cases in which the `sqrt(R)` coefficient drops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    /// General position: coefficient `sqrt(R)`.
    None,
    /// Two frontal slices (`K = 2`): coefficient 1.
    K2,
    /// The perturbed tensor shares the `A` and `B` factors: coefficient 1.
    SharedFactor,
}

/// A spectral-variation bound `c * |E x1 A^-1 x2 B^-1|_sp`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvBound {
    /// The sound bound: `c` times the spectral-norm *upper* bound of the
    /// transformed error (smallest unfolding operator norm).
    pub value: f64,
    /// Coefficient used (`sqrt(R)` or 1).
    pub coefficient: f64,
    /// Power-iteration lower estimate of the transformed error's
    /// spectral norm (diagnostic; `c * spectral_lower` is an estimate of
    /// the bound, not a certificate).
    pub spectral_lower: f64,
    /// Spectral-norm upper bound of the transformed error.
    pub spectral_upper: f64,
}

/// Relative singular-value floor below which `A` or `B` counts as
/// singular.
const INVERTIBILITY_TOL: f64 = 1e-12;

/// Bound the spectral variation between the joint spectra of the tensor
/// with CPD `f` (square invertible `A`, `B`) and its perturbation by
/// `E`: `sv <= c * |E x1 A^-1 x2 B^-1|_sp`.
///
/// The bound assumes the columns of `C` have unit norm (rescale the CPD
/// first, absorbing the column norms into `A` or `B`); otherwise the
/// returned value is not a valid spectral-variation bound.
pub fn bauer_fike_sv_bound(
    f: &FactorTriple,
    e: &Tensor3,
    special_case: SpecialCase,
) -> Result<SvBound, BoundsError> {
    let r = f.rank();
    let (ra, rb, _) = f.dims();
    if ra != r || rb != r {
        return Err(BoundsError::Precondition(format!(
            "A and B must be square rank-by-rank matrices, got {ra}x{r} and {rb}x{r}"
        )));
    }
    if e.dims().0 != r || e.dims().1 != r || e.dims().2 != f.dims().2 {
        return Err(BoundsError::DimensionMismatch(format!(
            "perturbation dims {:?} vs factor dims {:?}",
            e.dims(),
            f.dims()
        )));
    }
    let a_svd = RobustSvd::new(&f.a);
    let b_svd = RobustSvd::new(&f.b);
    if a_svd.sigma_min() <= INVERTIBILITY_TOL * a_svd.sigma_max()
        || b_svd.sigma_min() <= INVERTIBILITY_TOL * b_svd.sigma_max()
    {
        return Err(BoundsError::Precondition(
            "A or B is numerically singular; the transformed error is undefined".into(),
        ));
    }
    let a_inv = a_svd.pseudo_inverse(0.0);
    let b_inv = b_svd.pseudo_inverse(0.0);
    let transformed = e.modal_product(&a_inv, 1)?.modal_product(&b_inv, 2)?;

    let coefficient = match special_case {
        SpecialCase::None => (r as f64).sqrt(),
        SpecialCase::K2 | SpecialCase::SharedFactor => 1.0,
    };
    let mut rng = SeededRng::new(0xbf1e);
    let sp = spectral_norm_bounds(&transformed, &mut rng, 8);
    Ok(SvBound {
        value: coefficient * sp.upper,
        coefficient,
        spectral_lower: sp.lower,
        spectral_upper: sp.upper,
    })
}
