//! Certificates for full-size and measured tensors via orthogonal
//! compression.

use cpd_approx::{cpd_als, AlsOptions};
use tensor_compress::mlsvd_truncate;
use tensor_core::{singular_values, synthesize, SeededRng, Tensor3};

use crate::{multi_pencil_epsilon, BoundReport, BoundsError, MeasuredCertificate, Verdict};

/// Options shared by the compression-based certificates.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Relative singular-value threshold for numerical rank decisions.
    pub rank_tol: f64,
    /// Number of random orthogonal slice mixes to try.
    pub n_unitaries: usize,
    /// Optimize the slice pairing exhaustively per mix.
    pub reorder: bool,
    /// Options for the CPD fit in [`mlsvd_existence_check`].
    pub als: AlsOptions,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            rank_tol: crate::DEFAULT_TOL,
            n_unitaries: 100,
            reorder: false,
            als: AlsOptions::default(),
        }
    }
}

/// Certify an existence neighborhood of a full-size tensor of low
/// multilinear rank.
///
/// The tensor is orthogonally compressed to its `R x R x K` core
/// (`K` = numerical mode-3 rank) and the multi-pencil certificate is
/// computed there; the certified radius applies to the original tensor
/// because orthogonal compression preserves the relevant geometry.
pub fn certify_neighborhood(
    tprime: &Tensor3,
    r: usize,
    rng: &mut SeededRng,
    opts: CertifyOptions,
) -> Result<BoundReport, BoundsError> {
    let k = check_multilinear_rank(tprime, r, opts.rank_tol)?;
    if tprime.dims() == (r, r, k) {
        // Already core-sized: compressing would only rotate the slices.
        return multi_pencil_epsilon(tprime, rng, opts.n_unitaries, opts.reorder);
    }
    let core = if tprime.dims().2 == k {
        // The certificate is invariant under mode-1/2 rotations but not
        // under mode-3 slice mixes, so an untruncated mode 3 is left in
        // its original basis.
        let v1 = tensor_core::leading_left_singular_vectors(&tprime.unfold(1), r);
        let v2 = tensor_core::leading_left_singular_vectors(&tprime.unfold(2), r);
        tprime.modal_product(&v1.transpose(), 1)?.modal_product(&v2.transpose(), 2)?
    } else {
        mlsvd_truncate(tprime, (r, r, k))?.core
    };
    multi_pencil_epsilon(&core, rng, opts.n_unitaries, opts.reorder)
}

/// Existence certificate for a measured tensor (Frobenius-noisy,
/// full-size).
///
/// Truncates the multilinear SVD of `mprime` to `(R, R, K)`, computes
/// the multi-pencil epsilon of the core `W`, fits a rank-`R` CPD to the
/// core, and certifies when the fitted tensor is strictly closer to the
/// measurement than `epsilon` minus the truncation error.
pub fn mlsvd_existence_check(
    mprime: &Tensor3,
    r: usize,
    rng: &mut SeededRng,
    opts: CertifyOptions,
) -> Result<MeasuredCertificate, BoundsError> {
    let (i1, i2, _) = mprime.dims();
    if r == 0 || r > i1.min(i2) {
        return Err(BoundsError::InvalidArgument(format!(
            "rank {r} out of range 1..={}",
            i1.min(i2)
        )));
    }
    let k = mode3_numerical_rank(mprime, opts.rank_tol).clamp(2, r.max(2)).min(mprime.dims().2);
    let compression = mlsvd_truncate(mprime, (r, r, k))?;
    let w = &compression.core;
    let mlsvd_error = compression.residual;

    let core_report = multi_pencil_epsilon(w, rng, opts.n_unitaries, opts.reorder)?;
    let epsilon = core_report.epsilon;

    let mut fit_rng = rng.child(&[0xf17]);
    let fit = cpd_als(w, r, &mut fit_rng, opts.als)?;
    let core_fit_error = synthesize(&fit.factors).sub(w)?.frobenius_norm();

    // The truncation residual is orthogonal to everything in the
    // compressed subspace, so the full-size fit error follows by
    // Pythagoras.
    let fit_error = (mlsvd_error.powi(2) + core_fit_error.powi(2)).sqrt();
    let slack = epsilon - mlsvd_error - fit_error;
    Ok(MeasuredCertificate {
        mlsvd_error,
        fit_error,
        core_fit_error,
        epsilon,
        slack,
        verdict: if fit_error < epsilon - mlsvd_error {
            Verdict::Certified
        } else {
            Verdict::Inconclusive
        },
        core_report,
    })
}

/// Numerical mode-3 rank at a relative threshold.
fn mode3_numerical_rank(t: &Tensor3, rank_tol: f64) -> usize {
    let sv = singular_values(&t.unfold(3));
    let smax = sv.iter().copied().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * smax).count()
}

/// Verify multilinear rank at most `(R, R, R)` and return the mode-3
/// rank `K` (which must satisfy `2 <= K <= R`).
fn check_multilinear_rank(t: &Tensor3, r: usize, rank_tol: f64) -> Result<usize, BoundsError> {
    let mut ranks = [0usize; 3];
    let mut spectra_msg = String::new();
    for mode in 1..=3 {
        let sv = singular_values(&t.unfold(mode));
        let smax = sv.iter().copied().fold(0.0f64, f64::max);
        ranks[mode - 1] = if smax == 0.0 {
            0
        } else {
            sv.iter().filter(|&&s| s > rank_tol * smax).count()
        };
        let head: Vec<String> =
            sv.iter().take(r + 1).map(|s| format!("{s:.3e}")).collect();
        spectra_msg.push_str(&format!(" mode-{mode}: [{}]", head.join(", ")));
    }
    if ranks[0] > r || ranks[1] > r || ranks[2] > r {
        return Err(BoundsError::Precondition(format!(
            "numerical multilinear rank {ranks:?} exceeds ({r}, {r}, {r}) at tolerance \
             {rank_tol:e}; leading singular values:{spectra_msg}"
        )));
    }
    let k = ranks[2];
    if k < 2 {
        return Err(BoundsError::Precondition(format!(
            "mode-3 numerical rank {k} < 2; no pencil structure is available"
        )));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tensor_core::random_rank_r;

    fn opts(n_unitaries: usize) -> CertifyOptions {
        CertifyOptions { n_unitaries, ..CertifyOptions::default() }
    }

    #[test]
    fn core_sized_input_matches_multi_pencil_directly() {
        let (t, _) = random_rank_r(&mut SeededRng::new(1), (4, 4, 4), 4).unwrap();
        let via_pipeline = certify_neighborhood(&t, 4, &mut SeededRng::new(2), opts(3)).unwrap();
        let direct = multi_pencil_epsilon(&t, &mut SeededRng::new(2), 3, false).unwrap();
        assert!(
            (via_pipeline.epsilon - direct.epsilon).abs() < 1e-9 * direct.epsilon.max(1e-12),
            "{} vs {}",
            via_pipeline.epsilon,
            direct.epsilon
        );
    }

    #[test]
    fn epsilon_matches_between_tensor_and_core() {
        let (t, _) = random_rank_r(&mut SeededRng::new(3), (10, 10, 10), 4).unwrap();
        let report = certify_neighborhood(&t, 4, &mut SeededRng::new(4), opts(3)).unwrap();
        let core = mlsvd_truncate(&t, (4, 4, 4)).unwrap().core;
        let direct = multi_pencil_epsilon(&core, &mut SeededRng::new(4), 3, false).unwrap();
        assert!(
            (report.epsilon - direct.epsilon).abs() < 1e-9 * direct.epsilon.max(1e-12),
            "{} vs {}",
            report.epsilon,
            direct.epsilon
        );
        assert!(report.epsilon > 0.0);
    }

    #[test]
    fn epsilon_invariant_under_outer_unitary_embedding() {
        let (t, _) = random_rank_r(&mut SeededRng::new(5), (3, 3, 3), 3).unwrap();
        let small = certify_neighborhood(&t, 3, &mut SeededRng::new(6), opts(2)).unwrap();
        // Embed into 6 x 6 x 3 by padding modes 1 and 2 and rotating by
        // outer orthogonal transforms.
        let mut padded = Tensor3::zeros((6, 6, 3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    padded[(i, j, k)] = t[(i, j, k)];
                }
            }
        }
        let mut qrng = SeededRng::new(7);
        let q1 = qrng.haar_orthogonal(6);
        let q2 = qrng.haar_orthogonal(6);
        let embedded = padded.modal_product(&q1, 1).unwrap().modal_product(&q2, 2).unwrap();
        let big = certify_neighborhood(&embedded, 3, &mut SeededRng::new(6), opts(2)).unwrap();
        assert!(
            (small.epsilon - big.epsilon).abs() < 1e-9 * small.epsilon.max(1e-12),
            "{} vs {}",
            small.epsilon,
            big.epsilon
        );
    }

    #[test]
    fn excessive_rank_is_a_precondition_error() {
        let mut rng = SeededRng::new(8);
        let t = Tensor3::from_fn((5, 5, 5), |_, _, _| rng.normal());
        assert!(matches!(
            certify_neighborhood(&t, 3, &mut SeededRng::new(9), opts(1)),
            Err(BoundsError::Precondition(_))
        ));
    }

    #[test]
    fn exact_low_rank_measurement_is_certified() {
        let (t, _) = random_rank_r(&mut SeededRng::new(10), (8, 8, 8), 3).unwrap();
        let cert = mlsvd_existence_check(&t, 3, &mut SeededRng::new(11), opts(5)).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified, "slack {}", cert.slack);
        assert!(cert.mlsvd_error < 1e-10);
        assert!(cert.core_fit_error < cert.epsilon);
        assert!(cert.slack > 0.0);
    }

    #[test]
    fn white_noise_measurement_is_inconclusive() {
        let mut rng = SeededRng::new(12);
        let t = Tensor3::from_fn((8, 8, 8), |_, _, _| rng.normal());
        let cert = mlsvd_existence_check(&t, 4, &mut SeededRng::new(13), opts(5)).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert!(cert.slack <= 0.0);
    }
}
