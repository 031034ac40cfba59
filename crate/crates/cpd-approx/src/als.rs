//! Alternating least squares for the rank-R CPD.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use tensor_core::{khatri_rao, synthesize, CoreError, FactorTriple, SeededRng, Tensor3};

/// Options for [`cpd_als`].
#[derive(Debug, Clone, Copy)]
pub struct AlsOptions {
    /// Maximum full sweeps per restart.
    pub max_iters: usize,
    /// Convergence threshold on the relative objective change.
    pub tol: f64,
    /// Number of random initializations; the best fit is returned.
    pub restarts: usize,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-8, restarts: 5 }
    }
}

/// Result of a CPD fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub factors: FactorTriple,
    /// `|T - synthesize(factors)|_F / |T|_F`.
    pub rel_error: f64,
    /// Sweeps used by the returned (best) restart.
    pub iterations: usize,
    /// Whether the returned restart met the tolerance before `max_iters`.
    pub converged: bool,
}

/// Fit a rank-`R` CPD by alternating least squares from random normal
/// initializations.
///
/// Each mode update solves its linear least-squares problem exactly, so
/// the objective is nonincreasing across half-sweeps; the best restart
/// (smallest final objective) is returned.
pub fn cpd_als(
    t: &Tensor3,
    r: usize,
    rng: &mut SeededRng,
    opts: AlsOptions,
) -> Result<FitResult, CoreError> {
    if r == 0 {
        return Err(CoreError::InvalidArgument("rank must be positive".into()));
    }
    let mut best: Option<FitResult> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut trial_rng = rng.child(&[0xa15, restart as u64]);
        let fit = als_single(t, r, &mut trial_rng, opts)?;
        let better = best.as_ref().map_or(true, |b| fit.rel_error < b.rel_error);
        if better {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart ran"))
}

fn als_single(
    t: &Tensor3,
    r: usize,
    rng: &mut SeededRng,
    opts: AlsOptions,
) -> Result<FitResult, CoreError> {
    let (i1, i2, i3) = t.dims();
    let norm_t = t.frobenius_norm();
    if norm_t == 0.0 {
        // The zero tensor is fit exactly by zero factors.
        let f = FactorTriple::new(
            DMatrix::zeros(i1, r),
            DMatrix::zeros(i2, r),
            DMatrix::zeros(i3, r),
        )?;
        return Ok(FitResult { factors: f, rel_error: 0.0, iterations: 0, converged: true });
    }

    let unf = [t.unfold(1), t.unfold(2), t.unfold(3)];
    let mut a = rng.normal_matrix(i1, r);
    let mut b = rng.normal_matrix(i2, r);
    let mut c = rng.normal_matrix(i3, r);

    let mut prev_err = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for iter in 0..opts.max_iters {
        iterations = iter + 1;
        // Mode updates. For mode 1 the model is unfold1 = A (C ⊙ B)^T,
        // and cyclically for the other modes with this crate's layout.
        a = solve_mode(&unf[0], &c, &b);
        b = solve_mode(&unf[1], &c, &a);
        c = solve_mode(&unf[2], &b, &a);

        // Rebalance: move the A and B column norms into C to prevent
        // scale drift across sweeps (the represented tensor is
        // unchanged).
        for col in 0..r {
            let (na, nb) = (a.column(col).norm(), b.column(col).norm());
            if na > 0.0 && nb > 0.0 {
                let mut ca = a.column_mut(col);
                ca /= na;
                let mut cb = b.column_mut(col);
                cb /= nb;
                let mut cc = c.column_mut(col);
                cc *= na * nb;
            }
        }

        let err = objective(norm_t, &unf[2], &c, &b, &a);
        if prev_err.is_finite() && (prev_err - err).abs() <= opts.tol * prev_err.max(1e-300) {
            converged = true;
            break;
        }
        prev_err = err;
    }

    let factors = FactorTriple::new(a, b, c)?;
    // Report the exactly recomputed relative error, not the recursion.
    let rel_error = synthesize(&factors).sub(t)?.frobenius_norm() / norm_t;
    Ok(FitResult { factors, rel_error, iterations, converged })
}

/// Exact least-squares update of one factor: solve `F G = V` where
/// `V = unfolding * (X ⊙ Y)` and `G = (X^T X) ∘ (Y^T Y)`.
fn solve_mode(unfolding: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let kr = khatri_rao(x, y);
    let v = unfolding * &kr;
    let gram = (x.transpose() * x).component_mul(&(y.transpose() * y));
    solve_gram(&gram, &v)
}

/// Solve `F G = V` for `F`, with an SVD pseudo-inverse fallback when the
/// Gram matrix is numerically singular.
fn solve_gram(gram: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(chol) = gram.clone().cholesky() {
        chol.solve(&v.transpose()).transpose()
    } else {
        let pinv = tensor_core::RobustSvd::new(gram).pseudo_inverse(1e-12);
        v * pinv
    }
}

/// Squared-error objective evaluated cheaply from Gram matrices:
/// `|T - F (X ⊙ Y)^T|_F` for the mode-3 model.
fn objective(
    norm_t: f64,
    unfolding3: &DMatrix<f64>,
    f: &DMatrix<f64>,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
) -> f64 {
    let kr = khatri_rao(x, y);
    let v = unfolding3 * &kr;
    let gram = (x.transpose() * x).component_mul(&(y.transpose() * y));
    let cross: f64 = f.component_mul(&v).sum();
    let model: f64 = (f * gram).component_mul(f).sum();
    (norm_t * norm_t - 2.0 * cross + model).max(0.0).sqrt()
}
