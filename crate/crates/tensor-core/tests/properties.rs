//! Property tests for the core tensor invariants.

use nalgebra::DMatrix;
use proptest::prelude::*;
use tensor_core::{add_noise_at_snr, random_rank_r, SeededRng, Tensor3};

fn dims_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..6, 1usize..6, 1usize..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unfold_refold_identity(dims in dims_strategy(), seed in any::<u64>(), mode in 1usize..4) {
        let mut rng = SeededRng::new(seed);
        let t = Tensor3::from_fn(dims, |_, _, _| rng.normal());
        let back = Tensor3::refold(&t.unfold(mode), mode, dims).unwrap();
        prop_assert_eq!(t, back);
    }

    #[test]
    fn unitary_mode3_product_preserves_norm(seed in any::<u64>(), k in 2usize..6) {
        let mut rng = SeededRng::new(seed);
        let t = Tensor3::from_fn((3, 4, k), |_, _, _| rng.normal());
        let q = rng.normal_matrix(k, k).qr().q();
        let p = t.modal_product(&q, 3).unwrap();
        prop_assert!((p.frobenius_norm() - t.frobenius_norm()).abs() <= 1e-12 * t.frobenius_norm().max(1.0));
    }

    #[test]
    fn synthesized_slices_match_diagonal_form(seed in any::<u64>(), r in 1usize..5) {
        let mut rng = SeededRng::new(seed);
        let (t, f) = random_rank_r(&mut rng, (4, 3, 5), r).unwrap();
        for k in 0..5 {
            let expected = &f.a * f.diagonal_slice(k) * f.b.transpose();
            let diff = (t.frontal_slice(k) - expected).norm();
            prop_assert!(diff <= 1e-12, "slice {}: {}", k, diff);
        }
    }

    #[test]
    fn snr_is_exact(seed in any::<u64>(), snr in -40.0f64..60.0) {
        let mut rng = SeededRng::new(seed);
        let (t, _) = random_rank_r(&mut rng, (4, 4, 4), 2).unwrap();
        let (noisy, n) = add_noise_at_snr(&t, &mut rng, snr).unwrap();
        let achieved = 20.0 * (t.frobenius_norm() / n.frobenius_norm()).log10();
        prop_assert!((achieved - snr).abs() < 1e-9);
        let diff = noisy.sub(&t).unwrap().sub(&n).unwrap().frobenius_norm();
        prop_assert!(diff <= 1e-12 * noisy.frobenius_norm().max(1.0));
    }

    #[test]
    fn determinism_of_randomized_ops(seed in any::<u64>()) {
        let (t1, f1) = random_rank_r(&mut SeededRng::new(seed), (3, 3, 3), 2).unwrap();
        let (t2, f2) = random_rank_r(&mut SeededRng::new(seed), (3, 3, 3), 2).unwrap();
        prop_assert_eq!(t1, t2);
        prop_assert_eq!(f1, f2);
    }
}

#[test]
fn modal_product_is_matrix_on_fibers() {
    // Mode-2 product with a 1-row matrix picks out weighted fiber sums.
    let t = Tensor3::from_fn((2, 3, 2), |i, j, k| (i + 10 * j + 100 * k) as f64);
    let weights = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
    let p = t.modal_product(&weights, 2).unwrap();
    for i in 0..2 {
        for k in 0..2 {
            let expected: f64 = (0..3).map(|j| ((i + 10 * j + 100 * k) as f64) * (j as f64 + 1.0)).sum();
            assert_eq!(p[(i, 0, k)], expected);
        }
    }
}
