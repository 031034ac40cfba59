//! Metrics on lines and spectra: chordal, spectral variation, matching
//! distance.

use itertools::Itertools;

use crate::assignment::bottleneck_assignment;
use crate::{JgeError, Line, Spectrum};

/// Matching distance switches from exhaustive permutation search to
/// bottleneck assignment above this spectrum size.
const EXHAUSTIVE_LIMIT: usize = 8;

/// Chordal distance between two lines: `sqrt(1 - <λ1, λ2>^2)` for unit
/// representatives. This is the sine of the angle between the lines; it
/// is a metric on the projective line space.
pub fn chordal(l1: &Line, l2: &Line) -> Result<f64, JgeError> {
    if l1.dim() != l2.dim() {
        return Err(JgeError::DimensionMismatch(format!(
            "chordal distance between lines in R^{} and R^{}",
            l1.dim(),
            l2.dim()
        )));
    }
    // Computed as the norm of the wedge product |u ∧ v| rather than
    // sqrt(1 - <u,v>^2): the latter loses half its significant digits
    // near zero distance, which would put a spurious ~1e-8 floor under
    // the metric and defeat the simplicity-gap tolerance.
    let (u, v) = (l1.rep(), l2.rep());
    let k = u.len();
    let mut s2 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let w = u[i] * v[j] - u[j] * v[i];
            s2 += w * w;
        }
    }
    Ok(s2.sqrt().min(1.0))
}

fn check_spectra(s1: &Spectrum, s2: &Spectrum) -> Result<(), JgeError> {
    if s1.is_empty() || s2.is_empty() {
        return Err(JgeError::InvalidArgument("empty spectrum".into()));
    }
    if s1.dim() != s2.dim() {
        return Err(JgeError::DimensionMismatch(format!(
            "spectra in R^{} and R^{}",
            s1.dim(),
            s2.dim()
        )));
    }
    Ok(())
}

/// Spectral variation from `s_from` to `s_to`:
/// `max over lines L of s_to of min over lines M of s_from of chordal(M, L)`.
///
/// Asymmetric: it is zero iff every line of `s_to` lies (up to distance
/// zero) in `s_from`.
pub fn spectral_variation(s_from: &Spectrum, s_to: &Spectrum) -> Result<f64, JgeError> {
    check_spectra(s_from, s_to)?;
    let mut worst: f64 = 0.0;
    for to in &s_to.lines {
        let mut best = f64::INFINITY;
        for from in &s_from.lines {
            best = best.min(chordal(from, to)?);
        }
        worst = worst.max(best);
    }
    Ok(worst)
}

/// Matching distance: minimum over permutations `π` of
/// `max_k chordal(s1[k], s2[π(k)])`. Symmetric, and an upper bound for
/// the spectral variation in both directions.
///
/// Exhaustive permutation search is used for spectra of at most 8 lines;
/// larger spectra are handled by bottleneck assignment (identical result,
/// verified against the exhaustive oracle in tests).
pub fn matching_distance(s1: &Spectrum, s2: &Spectrum) -> Result<f64, JgeError> {
    check_spectra(s1, s2)?;
    if s1.len() != s2.len() {
        return Err(JgeError::DimensionMismatch(format!(
            "matching distance between spectra of {} and {} lines",
            s1.len(),
            s2.len()
        )));
    }
    if s1.len() <= EXHAUSTIVE_LIMIT {
        exhaustive_matching_distance(s1, s2)
    } else {
        bottleneck_matching_distance(s1, s2)
    }
}

/// Matching distance by brute force over all permutations.
pub fn exhaustive_matching_distance(s1: &Spectrum, s2: &Spectrum) -> Result<f64, JgeError> {
    let d = distance_matrix(s1, s2)?;
    let n = s1.len();
    let best = (0..n)
        .permutations(n)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| d[i][j])
                .fold(0.0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Matching distance by bottleneck assignment: binary search over the
/// distinct pairwise distances, testing perfect-matching feasibility on
/// the thresholded bipartite graph.
pub fn bottleneck_matching_distance(s1: &Spectrum, s2: &Spectrum) -> Result<f64, JgeError> {
    let d = distance_matrix(s1, s2)?;
    Ok(bottleneck_assignment(&d))
}

fn distance_matrix(s1: &Spectrum, s2: &Spectrum) -> Result<Vec<Vec<f64>>, JgeError> {
    s1.lines
        .iter()
        .map(|a| s2.lines.iter().map(|b| chordal(a, b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(lines: &[&[f64]]) -> Spectrum {
        Spectrum {
            lines: lines.iter().map(|l| Line::from_slice(l).unwrap()).collect(),
            all_real: true,
            eigvectors: None,
        }
    }

    #[test]
    fn chordal_of_orthogonal_lines_is_one() {
        let e1 = Line::from_slice(&[1.0, 0.0]).unwrap();
        let e2 = Line::from_slice(&[0.0, 1.0]).unwrap();
        assert_eq!(chordal(&e1, &e2).unwrap(), 1.0);
    }

    #[test]
    fn chordal_of_equal_lines_is_zero() {
        let l = Line::from_slice(&[1.0, 2.0, -1.0]).unwrap();
        assert!(chordal(&l, &l).unwrap() < 1e-12);
    }

    #[test]
    fn chordal_diagonal_line() {
        let e1 = Line::from_slice(&[1.0, 0.0]).unwrap();
        let d = Line::from_slice(&[1.0, 1.0]).unwrap();
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((chordal(&e1, &d).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn chordal_dim_mismatch_is_error() {
        let a = Line::from_slice(&[1.0, 0.0]).unwrap();
        let b = Line::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        assert!(chordal(&a, &b).is_err());
    }

    #[test]
    fn sv_is_asymmetric_on_collapsed_spectrum() {
        // Two distinct lines vs. the same line twice: one direction sees
        // everything, the other misses a line entirely.
        let s1 = spectrum(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let s2 = spectrum(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(spectral_variation(&s1, &s2).unwrap(), 0.0);
        assert_eq!(spectral_variation(&s2, &s1).unwrap(), 1.0);
    }

    #[test]
    fn sv_of_identical_spectra_is_zero() {
        let s = spectrum(&[&[1.0, 2.0], &[3.0, -1.0]]);
        assert!(spectral_variation(&s, &s).unwrap() < 1e-12);
    }

    #[test]
    fn sv_of_singletons_is_chordal() {
        let s1 = spectrum(&[&[1.0, 0.0]]);
        let s2 = spectrum(&[&[1.0, 1.0]]);
        let expected = chordal(&s1.lines[0], &s2.lines[0]).unwrap();
        assert_eq!(spectral_variation(&s1, &s2).unwrap(), expected);
    }

    #[test]
    fn matching_distance_forces_bad_pairing() {
        let s1 = spectrum(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let s2 = spectrum(&[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(matching_distance(&s1, &s2).unwrap(), 1.0);
    }

    #[test]
    fn matching_distance_of_identical_spectra_is_zero() {
        let s = spectrum(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 0.25]]);
        assert!(matching_distance(&s, &s).unwrap() < 1e-12);
    }

    #[test]
    fn matching_distance_cardinality_mismatch_is_error() {
        let s1 = spectrum(&[&[1.0, 0.0]]);
        let s2 = spectrum(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matching_distance(&s1, &s2).is_err());
    }

    #[test]
    fn bottleneck_agrees_with_exhaustive() {
        // R = 6 random-ish spectra; the two algorithms must agree exactly.
        let mut lines1 = Vec::new();
        let mut lines2 = Vec::new();
        for i in 0..6u32 {
            let x = f64::from(i) * 0.37 + 0.1;
            let y = (f64::from(i) * 1.93).sin();
            lines1.push(vec![x, y]);
            lines2.push(vec![y + 0.3, x * 1.7 - 0.5]);
        }
        let s1 = spectrum(&lines1.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
        let s2 = spectrum(&lines2.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
        let a = exhaustive_matching_distance(&s1, &s2).unwrap();
        let b = bottleneck_matching_distance(&s1, &s2).unwrap();
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }
}
