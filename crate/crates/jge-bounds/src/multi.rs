//! Multi-pencil certificates: slice mixing, pairing, and the unitary
//! search.

use nalgebra::DMatrix;
use tensor_core::{SeededRng, Tensor3};

use crate::report::SCHEMA_VERSION;
use crate::{
    pencil_existence_epsilon, BoundReport, BoundsError, PencilDetail, ReportMeta, Verdict,
};

/// Largest slice count for which pairings are optimized exhaustively.
const MAX_REORDER_SLICES: usize = 12;

/// Multi-pencil existence epsilon with a random orthogonal slice-mix
/// search.
///
/// The identity mix is always evaluated, plus `n_unitaries` Haar-random
/// orthogonal `K x K` mixes; the report describes the best
/// configuration found (largest epsilon). With `reorder` the disjoint
/// slice pairing is optimized exhaustively per mix, otherwise the
/// consecutive pairing `(1,2), (3,4), ...` is used.
pub fn multi_pencil_epsilon(
    t: &Tensor3,
    rng: &mut SeededRng,
    n_unitaries: usize,
    reorder: bool,
) -> Result<BoundReport, BoundsError> {
    let k = slice_count(t)?;
    let mut unitaries = vec![DMatrix::identity(k, k)];
    let mut sampler = rng.child(&[0x0172]);
    for _ in 0..n_unitaries {
        unitaries.push(sampler.haar_orthogonal(k));
    }
    multi_pencil_epsilon_over(t, &unitaries, rng, reorder, n_unitaries)
}

/// As [`multi_pencil_epsilon`], but over a caller-supplied set of
/// orthogonal slice mixes (the identity is *not* added implicitly).
pub fn multi_pencil_epsilon_over(
    t: &Tensor3,
    unitaries: &[DMatrix<f64>],
    rng: &mut SeededRng,
    reorder: bool,
    reported_n_unitaries: usize,
) -> Result<BoundReport, BoundsError> {
    let k = slice_count(t)?;
    if unitaries.is_empty() {
        return Err(BoundsError::InvalidArgument("no slice mixes given".into()));
    }
    if reorder && k > MAX_REORDER_SLICES {
        return Err(BoundsError::InvalidArgument(format!(
            "exhaustive pairing supports at most {MAX_REORDER_SLICES} slices, got {k}"
        )));
    }

    let mut best: Option<BoundReport> = None;
    for (u_index, u) in unitaries.iter().enumerate() {
        if u.nrows() != k || u.ncols() != k {
            return Err(BoundsError::DimensionMismatch(format!(
                "slice mix {u_index} is {}x{}, expected {k}x{k}",
                u.nrows(),
                u.ncols()
            )));
        }
        let mixed = t.modal_product(u, 3)?;
        let candidate = if reorder {
            best_pairing_report(&mixed, rng, u_index)?
        } else {
            consecutive_report(&mixed, rng, u_index)?
        };
        let better = best.as_ref().map_or(true, |b| candidate.0 > b.epsilon);
        if better {
            let (epsilon, epsilon_vector, pairing, per_pencil) = candidate;
            best = Some(BoundReport {
                epsilon_vector,
                epsilon,
                existence_radius: epsilon / 2.0,
                unitary: u.clone(),
                pairing,
                per_pencil,
                verdict: if epsilon > 0.0 { Verdict::Certified } else { Verdict::Inconclusive },
                meta: ReportMeta {
                    schema_version: SCHEMA_VERSION,
                    seed: rng.seed(),
                    n_unitaries: reported_n_unitaries,
                    reorder,
                    tol: crate::DEFAULT_TOL,
                },
            });
        }
    }
    Ok(best.expect("at least one mix evaluated"))
}

type PairingOutcome = (f64, Vec<f64>, Vec<(usize, usize)>, Vec<PencilDetail>);

/// Epsilon of the consecutive pairing `(1,2), (3,4), ...`.
fn consecutive_report(
    mixed: &Tensor3,
    rng: &mut SeededRng,
    u_index: usize,
) -> Result<PairingOutcome, BoundsError> {
    let k = mixed.dims().2;
    let pairing: Vec<(usize, usize)> = (0..k / 2).map(|i| (2 * i + 1, 2 * i + 2)).collect();
    evaluate_pairing(mixed, &pairing, rng, u_index)
}

/// Epsilon maximized over all disjoint pairings (odd slice counts leave
/// one slice unused).
fn best_pairing_report(
    mixed: &Tensor3,
    rng: &mut SeededRng,
    u_index: usize,
) -> Result<PairingOutcome, BoundsError> {
    let k = mixed.dims().2;
    // Pairwise epsilon (and detail) for every slice pair.
    let mut table: Vec<Vec<Option<(f64, PencilDetail)>>> = vec![vec![None; k + 1]; k + 1];
    for i in 1..=k {
        for j in (i + 1)..=k {
            let sub = subpencil(mixed, i, j)?;
            let mut child = rng.child(&[0xea1, u_index as u64, i as u64, j as u64]);
            let (eps, mut detail) =
                pencil_existence_epsilon(&sub, &mut child, crate::DEFAULT_TOL)?;
            detail.pair = (i, j);
            table[i][j] = Some((eps, detail));
        }
    }

    let mut best: Option<PairingOutcome> = None;
    for pairing in all_pairings(k) {
        let sq: f64 = pairing.iter().map(|&(i, j)| table[i][j].as_ref().unwrap().0.powi(2)).sum();
        let eps = sq.sqrt();
        if best.as_ref().map_or(true, |b| eps > b.0) {
            let epsilon_vector: Vec<f64> =
                pairing.iter().map(|&(i, j)| table[i][j].as_ref().unwrap().0).collect();
            let per_pencil: Vec<PencilDetail> =
                pairing.iter().map(|&(i, j)| table[i][j].as_ref().unwrap().1.clone()).collect();
            best = Some((eps, epsilon_vector, pairing, per_pencil));
        }
    }
    Ok(best.expect("at least one pairing exists for K >= 2"))
}

/// Evaluate one fixed pairing.
fn evaluate_pairing(
    mixed: &Tensor3,
    pairing: &[(usize, usize)],
    rng: &mut SeededRng,
    u_index: usize,
) -> Result<PairingOutcome, BoundsError> {
    let mut epsilon_vector = Vec::with_capacity(pairing.len());
    let mut per_pencil = Vec::with_capacity(pairing.len());
    for &(i, j) in pairing {
        let sub = subpencil(mixed, i, j)?;
        let mut child = rng.child(&[0xea1, u_index as u64, i as u64, j as u64]);
        let (eps, mut detail) = pencil_existence_epsilon(&sub, &mut child, crate::DEFAULT_TOL)?;
        detail.pair = (i, j);
        epsilon_vector.push(eps);
        per_pencil.push(detail);
    }
    let epsilon = epsilon_vector.iter().map(|e| e * e).sum::<f64>().sqrt();
    Ok((epsilon, epsilon_vector, pairing.to_vec(), per_pencil))
}

/// The `R x R x 2` subpencil of 1-based frontal slices `i`, `j`.
fn subpencil(t: &Tensor3, i: usize, j: usize) -> Result<Tensor3, BoundsError> {
    Ok(Tensor3::from_slices(&[t.frontal_slice(i - 1), t.frontal_slice(j - 1)])?)
}

fn slice_count(t: &Tensor3) -> Result<usize, BoundsError> {
    let (r1, r2, k) = t.dims();
    if r1 != r2 {
        return Err(BoundsError::Precondition(format!(
            "frontal slices must be square, got {r1}x{r2}"
        )));
    }
    if k < 2 {
        return Err(BoundsError::InvalidArgument(format!(
            "at least 2 frontal slices are required, got {k}"
        )));
    }
    Ok(k)
}

/// All maximal disjoint pairings of `1..=k` (each leaves at most one
/// element unpaired).
fn all_pairings(k: usize) -> Vec<Vec<(usize, usize)>> {
    let items: Vec<usize> = (1..=k).collect();
    if k % 2 == 0 {
        perfect_matchings(&items)
    } else {
        let mut out = Vec::new();
        for drop in 0..k {
            let rest: Vec<usize> =
                items.iter().copied().filter(|&x| x != items[drop]).collect();
            out.extend(perfect_matchings(&rest));
        }
        out
    }
}

/// All perfect matchings of an even-length sorted set.
fn perfect_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for pos in 1..items.len() {
        let partner = items[pos];
        let rest: Vec<usize> = items[1..]
            .iter()
            .copied()
            .filter(|&x| x != partner)
            .collect();
        for mut rest_matching in perfect_matchings(&rest) {
            let mut matching = vec![(first, partner)];
            matching.append(&mut rest_matching);
            out.push(matching);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tensor_core::random_rank_r;

    #[test]
    fn pairing_enumeration_counts() {
        assert_eq!(perfect_matchings(&[1, 2]).len(), 1);
        assert_eq!(perfect_matchings(&[1, 2, 3, 4]).len(), 3);
        assert_eq!(perfect_matchings(&[1, 2, 3, 4, 5, 6]).len(), 15);
        // Odd counts: one element dropped, all choices enumerated.
        assert_eq!(all_pairings(5).len(), 5 * 3);
    }

    #[test]
    fn k2_reduces_to_the_single_pencil_epsilon() {
        let (p, _) = random_rank_r(&mut SeededRng::new(1), (4, 4, 2), 4).unwrap();
        let report = multi_pencil_epsilon(&p, &mut SeededRng::new(2), 0, false).unwrap();
        let (eps, _) = pencil_existence_epsilon(&p, &mut SeededRng::new(3), 1e-8).unwrap();
        assert!((report.epsilon - eps).abs() < 1e-9 * eps.max(1e-12));
        assert_eq!(report.pairing, vec![(1, 2)]);
        assert_eq!(report.existence_radius, report.epsilon / 2.0);
    }

    #[test]
    fn epsilon_is_l2_of_the_vector() {
        let (t, _) = random_rank_r(&mut SeededRng::new(4), (3, 3, 4), 3).unwrap();
        let report = multi_pencil_epsilon(&t, &mut SeededRng::new(5), 3, false).unwrap();
        let l2: f64 = report.epsilon_vector.iter().map(|e| e * e).sum::<f64>().sqrt();
        assert!((report.epsilon - l2).abs() < 1e-12);
        assert_eq!(report.epsilon_vector.len(), 2);
        // Pairs are disjoint and within 1..=K.
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &report.pairing {
            assert!(i >= 1 && j <= 4 && i < j);
            assert!(seen.insert(i) && seen.insert(j));
        }
    }

    #[test]
    fn degenerate_charpoly_tensor_is_inconclusive() {
        let t = pencil_jge::fixtures::degenerate_charpoly_tensor();
        let report = multi_pencil_epsilon(&t, &mut SeededRng::new(6), 5, true).unwrap();
        assert_eq!(report.epsilon, 0.0);
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn more_unitaries_never_decrease_epsilon() {
        let (t, _) = random_rank_r(&mut SeededRng::new(7), (3, 3, 3), 3).unwrap();
        let mut prev = 0.0;
        for n in [0usize, 2, 8, 16] {
            let report = multi_pencil_epsilon(&t, &mut SeededRng::new(8), n, false).unwrap();
            assert!(
                report.epsilon >= prev - 1e-15,
                "n={n}: {} < {prev}",
                report.epsilon
            );
            prev = report.epsilon;
        }
    }

    #[test]
    fn reorder_never_decreases_epsilon() {
        for seed in 0..5u64 {
            let (t, _) = random_rank_r(&mut SeededRng::new(20 + seed), (3, 3, 4), 3).unwrap();
            let plain = multi_pencil_epsilon(&t, &mut SeededRng::new(30), 2, false).unwrap();
            let opt = multi_pencil_epsilon(&t, &mut SeededRng::new(30), 2, true).unwrap();
            assert!(
                opt.epsilon >= plain.epsilon - 1e-12,
                "seed {seed}: {} < {}",
                opt.epsilon,
                plain.epsilon
            );
        }
    }

    #[test]
    fn repeated_c_column_defeats_every_consecutive_subpencil() {
        // A repeated C column forces a repeated eigenvalue line in every
        // mixed subpencil, so all epsilon_i vanish.
        let mut rng = SeededRng::new(40);
        let a = rng.normal_matrix(3, 3);
        let b = rng.normal_matrix(3, 3);
        let mut c = rng.normal_matrix(4, 3);
        let dup = c.column(0).into_owned();
        c.set_column(1, &dup);
        let t = tensor_core::synthesize(
            &tensor_core::FactorTriple::new(a, b, c).unwrap(),
        );
        let report = multi_pencil_epsilon(&t, &mut SeededRng::new(41), 10, false).unwrap();
        assert_eq!(report.epsilon, 0.0);
        for d in &report.per_pencil {
            assert_eq!(d.epsilon_i, 0.0);
            assert_ne!(d.diagnosis, "Simple");
        }
    }

    #[test]
    fn rejects_nonsquare_and_single_slice() {
        let t = Tensor3::zeros((2, 3, 2));
        assert!(multi_pencil_epsilon(&t, &mut SeededRng::new(1), 0, false).is_err());
        let t = Tensor3::zeros((3, 3, 1));
        assert!(multi_pencil_epsilon(&t, &mut SeededRng::new(1), 0, false).is_err());
    }
}
