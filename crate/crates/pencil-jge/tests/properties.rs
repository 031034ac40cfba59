//! Property tests: metric axioms, homogeneity, and the Jennrich
//! round-trip on random simple pencils.

use nalgebra::DMatrix;
use pencil_jge::{
    char_poly_eval, chordal, jennrich_pencil_cpd, matching_distance, pencil_spectrum,
    spectral_variation, Line, PencilVerdict, Spectrum, DEFAULT_TOL,
};
use proptest::prelude::*;
use tensor_core::{random_rank_r, synthesize, SeededRng, Tensor3};

fn random_line(rng: &mut SeededRng, k: usize) -> Line {
    Line::new(rng.normal_vector(k)).unwrap()
}

fn random_spectrum(rng: &mut SeededRng, r: usize, k: usize) -> Spectrum {
    Spectrum {
        lines: (0..r).map(|_| random_line(rng, k)).collect(),
        all_real: true,
        eigvectors: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chordal_metric_axioms(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = SeededRng::new(seed);
        let (a, b, c) = (random_line(&mut rng, k), random_line(&mut rng, k), random_line(&mut rng, k));
        let dab = chordal(&a, &b).unwrap();
        let dba = chordal(&b, &a).unwrap();
        let dac = chordal(&a, &c).unwrap();
        let dcb = chordal(&c, &b).unwrap();
        prop_assert!(dab >= 0.0 && dab <= 1.0);
        prop_assert!((dab - dba).abs() <= 1e-12);
        prop_assert!(chordal(&a, &a).unwrap() <= 1e-12);
        prop_assert!(dab <= dac + dcb + 1e-10, "triangle: {} > {} + {}", dab, dac, dcb);
    }

    #[test]
    fn matching_distance_symmetric_and_dominates_sv(seed in any::<u64>(), r in 1usize..7, k in 2usize..4) {
        let mut rng = SeededRng::new(seed);
        let s1 = random_spectrum(&mut rng, r, k);
        let s2 = random_spectrum(&mut rng, r, k);
        let md12 = matching_distance(&s1, &s2).unwrap();
        let md21 = matching_distance(&s2, &s1).unwrap();
        prop_assert!((md12 - md21).abs() <= 1e-12);
        prop_assert!(md12 + 1e-12 >= spectral_variation(&s1, &s2).unwrap());
        prop_assert!(md12 + 1e-12 >= spectral_variation(&s2, &s1).unwrap());
    }

    #[test]
    fn charpoly_homogeneous(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = SeededRng::new(seed);
        let r = 3;
        let t = Tensor3::from_fn((r, r, 4), |_, _, _| rng.normal());
        let g = rng.normal_vector(4);
        let lhs = char_poly_eval(&t, &(&g * scale)).unwrap();
        let rhs = scale.powi(r as i32) * char_poly_eval(&t, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }
}

#[test]
fn jennrich_round_trip_across_ranks() {
    // Random rank-R R x R x 2 tensors for R = 2..=10; recovery must be
    // near-exact and the recovered C-column lines must match truth.
    for r in 2..=10usize {
        for trial in 0..5u64 {
            let mut rng = SeededRng::new(1000 + r as u64 * 17 + trial);
            let (p, f) = random_rank_r(&mut rng, (r, r, 2), r).unwrap();
            let d = jennrich_pencil_cpd(&p, &mut rng, DEFAULT_TOL).unwrap();
            assert_eq!(d.verdict, PencilVerdict::Simple, "R={r} trial={trial}");
            let cpd = d.cpd.unwrap();
            let err = synthesize(&cpd).sub(&p).unwrap().frobenius_norm() / p.frobenius_norm();
            assert!(err < 1e-7, "R={r} trial={trial}: reconstruction {err}");
            let truth = columns_spectrum(&f.c);
            let found = columns_spectrum(&cpd.c);
            let md = matching_distance(&truth, &found).unwrap();
            assert!(md < 1e-7, "R={r} trial={trial}: md {md}");
        }
    }
}

#[test]
fn spectrum_invariant_under_probe_seeds() {
    for r in [3usize, 6] {
        let (p, _) = random_rank_r(&mut SeededRng::new(44 + r as u64), (r, r, 2), r).unwrap();
        let spectra: Vec<Spectrum> = (0..4)
            .map(|s| {
                pencil_spectrum(&p, &mut SeededRng::new(s * 7919), DEFAULT_TOL)
                    .unwrap()
                    .spectrum
                    .unwrap()
            })
            .collect();
        for pair in spectra.windows(2) {
            assert!(matching_distance(&pair[0], &pair[1]).unwrap() < 1e-8);
        }
    }
}

fn columns_spectrum(c: &DMatrix<f64>) -> Spectrum {
    Spectrum {
        lines: (0..c.ncols())
            .map(|r| Line::new(c.column(r).into_owned()).unwrap())
            .collect(),
        all_real: true,
        eigvectors: None,
    }
}
