//! Higher-order power method for best rank-1 approximation and the
//! resulting spectral-norm sandwich.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use tensor_core::{khatri_rao, SeededRng, Tensor3};

use crate::operator_norm;

/// A stationary rank-1 approximation `sigma * a ⊗ b ⊗ c` with unit
/// `a, b, c`; `sigma` is a lower bound on the tensor spectral norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rank1Fit {
    pub sigma: f64,
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
}

/// Lower and upper bounds on the tensor spectral norm.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralNormBounds {
    /// Best stationary rank-1 value found (HOPM); a lower bound.
    pub lower: f64,
    /// Minimum over unfolding operator norms and the Frobenius norm.
    pub upper: f64,
}

const MAX_ITERS: usize = 500;
const REL_TOL: f64 = 1e-12;

/// Best rank-1 approximation by higher-order power iteration.
///
/// Initialized from the leading singular vectors of the three unfoldings
/// (one deterministic start) plus `restarts` random starts; the largest
/// stationary value over all starts is returned. The iteration value is
/// nondecreasing, so each start converges to a stationary point.
pub fn best_rank1_hopm(t: &Tensor3, rng: &mut SeededRng, restarts: usize) -> Rank1Fit {
    let (i1, i2, i3) = t.dims();
    if t.frobenius_norm() == 0.0 {
        return Rank1Fit {
            sigma: 0.0,
            a: unit_e1(i1),
            b: unit_e1(i2),
            c: unit_e1(i3),
        };
    }

    let mut starts: Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> = vec![svd_init(t)];
    for _ in 0..restarts {
        starts.push((
            rng.normal_vector(i1).normalize(),
            rng.normal_vector(i2).normalize(),
            rng.normal_vector(i3).normalize(),
        ));
    }

    starts
        .into_iter()
        .map(|(a, b, c)| power_iterate(t, a, b, c))
        .max_by(|x, y| x.sigma.partial_cmp(&y.sigma).unwrap())
        .expect("at least one start")
}

/// Sandwich the spectral norm: HOPM from below, the smallest unfolding
/// operator norm (itself at most the Frobenius norm) from above.
pub fn spectral_norm_bounds(t: &Tensor3, rng: &mut SeededRng, restarts: usize) -> SpectralNormBounds {
    let lower = best_rank1_hopm(t, rng, restarts).sigma;
    let upper = (1..=3)
        .map(|mode| operator_norm(&t.unfold(mode)))
        .fold(t.frobenius_norm(), f64::min);
    SpectralNormBounds { lower, upper }
}

fn unit_e1(n: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[0] = 1.0;
    v
}

/// Leading left singular vectors of the three unfoldings.
fn svd_init(t: &Tensor3) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
    let lead = |mode: usize| -> DVector<f64> {
        tensor_core::leading_left_singular_vectors(&t.unfold(mode), 1)
            .column(0)
            .into_owned()
    };
    (lead(1), lead(2), lead(3))
}

fn power_iterate(
    t: &Tensor3,
    mut a: DVector<f64>,
    mut b: DVector<f64>,
    mut c: DVector<f64>,
) -> Rank1Fit {
    let unf1 = t.unfold(1);
    let unf2 = t.unfold(2);
    let unf3 = t.unfold(3);
    let mut sigma = 0.0f64;
    for _ in 0..MAX_ITERS {
        a = normalize_or(&(&unf1 * contraction(&c, &b)), &a);
        b = normalize_or(&(&unf2 * contraction(&c, &a)), &b);
        let cu = &unf3 * contraction(&b, &a);
        let new_sigma = cu.norm();
        c = normalize_or(&cu, &c);
        if (new_sigma - sigma).abs() <= REL_TOL * new_sigma.max(1e-300) {
            sigma = new_sigma;
            break;
        }
        sigma = new_sigma;
    }
    Rank1Fit { sigma, a, b, c }
}

/// The vector `x ⊗ y` matching this crate's unfolding column order.
fn contraction(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    let xm = nalgebra::DMatrix::from_column_slice(x.len(), 1, x.as_slice());
    let ym = nalgebra::DMatrix::from_column_slice(y.len(), 1, y.as_slice());
    let kr = khatri_rao(&xm, &ym);
    kr.column(0).into_owned()
}

fn normalize_or(v: &DVector<f64>, fallback: &DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        fallback.clone()
    }
}
