//! Property tests: ALS never underperforms truncation-free bounds and
//! the spectral-norm sandwich holds on random inputs.

use cpd_approx::{best_rank1_hopm, cpd_als, spectral_norm_bounds, AlsOptions};
use proptest::prelude::*;
use tensor_core::{random_rank_r, synthesize, SeededRng, Tensor3};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_sandwich(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = SeededRng::new(seed);
        let t = Tensor3::from_fn((n, n, n), |_, _, _| rng.normal());
        let b = spectral_norm_bounds(&t, &mut SeededRng::new(seed ^ 0x9e37), 5);
        prop_assert!(b.lower >= 0.0);
        prop_assert!(b.lower <= b.upper + 1e-10 * b.upper.max(1.0));
        prop_assert!(b.upper <= t.frobenius_norm() + 1e-12);
    }

    #[test]
    fn hopm_sigma_matches_contraction(seed in any::<u64>()) {
        // At a stationary point, sigma equals the trilinear contraction
        // of the tensor with the unit factors.
        let mut rng = SeededRng::new(seed);
        let t = Tensor3::from_fn((4, 4, 4), |_, _, _| rng.normal());
        let fit = best_rank1_hopm(&t, &mut SeededRng::new(seed), 3);
        let mut contraction = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    contraction += t[(i, j, k)] * fit.a[i] * fit.b[j] * fit.c[k];
                }
            }
        }
        prop_assert!((fit.sigma - contraction.abs()) <= 1e-8 * fit.sigma.max(1.0));
    }

    #[test]
    fn als_rank1_matches_hopm(seed in any::<u64>()) {
        // Both solvers address the same best rank-1 problem; their
        // residuals must agree via |T - sigma abc|^2 = |T|^2 - sigma^2.
        let mut rng = SeededRng::new(seed);
        let t = Tensor3::from_fn((4, 3, 5), |_, _, _| rng.normal());
        let fit = cpd_als(&t, 1, &mut SeededRng::new(seed ^ 1), AlsOptions::default()).unwrap();
        let sigma = best_rank1_hopm(&t, &mut SeededRng::new(seed ^ 2), 5).sigma;
        let nt = t.frobenius_norm();
        let hopm_rel = ((nt * nt - sigma * sigma).max(0.0)).sqrt() / nt;
        prop_assert!(
            fit.rel_error <= hopm_rel + 1e-6,
            "ALS {} vs HOPM residual {}",
            fit.rel_error,
            hopm_rel
        );
    }
}

#[test]
fn als_recovers_exact_cpd_across_ranks() {
    for r in [2usize, 3, 5] {
        let (t, _) = random_rank_r(&mut SeededRng::new(300 + r as u64), (8, 8, 8), r).unwrap();
        let fit = cpd_als(&t, r, &mut SeededRng::new(400 + r as u64), AlsOptions::default())
            .unwrap();
        assert!(fit.rel_error < 1e-6, "R={r}: rel_error {}", fit.rel_error);
        let recomputed =
            synthesize(&fit.factors).sub(&t).unwrap().frobenius_norm() / t.frobenius_norm();
        assert!((fit.rel_error - recomputed).abs() < 1e-12);
    }
}

#[test]
fn als_is_deterministic_for_fixed_seed() {
    let (t, _) = random_rank_r(&mut SeededRng::new(55), (6, 6, 6), 3).unwrap();
    let f1 = cpd_als(&t, 3, &mut SeededRng::new(9), AlsOptions::default()).unwrap();
    let f2 = cpd_als(&t, 3, &mut SeededRng::new(9), AlsOptions::default()).unwrap();
    assert_eq!(f1.rel_error.to_bits(), f2.rel_error.to_bits());
    assert_eq!(f1.factors.a, f2.factors.a);
}
