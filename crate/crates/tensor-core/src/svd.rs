//! Robust singular value decomposition.
//!
//! The general-purpose SVD shipped with the matrix backend silently
//! returns inconsistent factors on some rank-deficient inputs (columns of
//! `U` that do not correspond to the reported singular values, with
//! reconstruction errors far above roundoff). Low-rank unfoldings with
//! exactly (or nearly) zero tail singular values are this workspace's
//! bread and butter, so all spectral computations go through this module
//! instead: a Householder QR reduction followed by a one-sided Jacobi
//! iteration. One-sided Jacobi is slower than bidiagonalization but
//! converges unconditionally and computes small singular values to high
//! relative accuracy, which the certificate bounds depend on.

use nalgebra::{DMatrix, DVector};

/// Thin SVD `M = U * diag(S) * V^T` with `U: m x k`, `V^T: k x n`,
/// `k = min(m, n)`, singular values sorted descending.
#[derive(Debug, Clone)]
pub struct RobustSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl RobustSvd {
    /// Decompose `m`.
    pub fn new(m: &DMatrix<f64>) -> Self {
        if m.nrows() >= m.ncols() {
            tall_svd(m)
        } else {
            let t = tall_svd(&m.transpose());
            RobustSvd {
                u: t.v_t.transpose(),
                singular_values: t.singular_values,
                v_t: t.u.transpose(),
            }
        }
    }

    /// Largest singular value (0 for an empty matrix).
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.iter().copied().next().unwrap_or(0.0)
    }

    /// Smallest singular value of the thin decomposition.
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.iter().copied().last().unwrap_or(0.0)
    }

    /// Numerical rank at a relative threshold: the number of singular
    /// values exceeding `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    /// Moore-Penrose pseudo-inverse, truncating singular values at
    /// `rel_tol * sigma_max`.
    pub fn pseudo_inverse(&self, rel_tol: f64) -> DMatrix<f64> {
        let cut = rel_tol * self.sigma_max();
        let k = self.singular_values.len();
        let inv = DMatrix::from_fn(k, k, |i, j| {
            if i == j && self.singular_values[i] > cut {
                1.0 / self.singular_values[i]
            } else {
                0.0
            }
        });
        self.v_t.transpose() * inv * self.u.transpose()
    }
}

/// All singular values of `m`, descending.
pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    RobustSvd::new(m).singular_values
}

/// Largest singular value of `m` (its operator 2-norm).
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    RobustSvd::new(m).sigma_max()
}

/// Smallest singular value of the thin decomposition of `m`.
pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    RobustSvd::new(m).sigma_min()
}

/// The top-`r` left singular vectors of `m`.
pub fn leading_left_singular_vectors(m: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    let svd = RobustSvd::new(m);
    svd.u.columns(0, r).into_owned()
}

/// SVD of a tall (or square) matrix via QR reduction and one-sided
/// Jacobi on the square factor.
fn tall_svd(m: &DMatrix<f64>) -> RobustSvd {
    let (rows, cols) = m.shape();
    debug_assert!(rows >= cols);
    if cols == 0 {
        return RobustSvd {
            u: DMatrix::zeros(rows, 0),
            singular_values: DVector::zeros(0),
            v_t: DMatrix::zeros(0, 0),
        };
    }
    let qr = m.clone().qr();
    let q = qr.q();
    let r = qr.r();

    let (u_r, sigma, v) = jacobi_svd_square(&r);
    RobustSvd {
        u: q * u_r,
        singular_values: sigma,
        v_t: v.transpose(),
    }
}

/// One-sided Jacobi SVD of a square matrix `a`: returns orthogonal `U`,
/// descending singular values, and orthogonal `V` with
/// `a = U * diag(S) * V^T`.
fn jacobi_svd_square(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let n = a.ncols();
    let mut b = a.clone();
    let mut v = DMatrix::identity(n, n);
    let eps = f64::EPSILON;

    // Rotate column pairs until all are mutually orthogonal.
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = b.column(i).norm_squared();
                let beta: f64 = b.column(j).norm_squared();
                let gamma: f64 = b.column(i).dot(&b.column(j));
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                // Rutishauser's stable rotation.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for row in 0..n {
                    let bi = b[(row, i)];
                    let bj = b[(row, j)];
                    b[(row, i)] = cs * bi - sn * bj;
                    b[(row, j)] = sn * bi + cs * bj;
                    let vi = v[(row, i)];
                    let vj = v[(row, j)];
                    v[(row, i)] = cs * vi - sn * vj;
                    v[(row, j)] = sn * vi + cs * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|c| b.column(c).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let sigma = DVector::from_fn(n, |i, _| norms[order[i]]);
    let v_sorted = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    // U columns: normalized B columns; zero columns get an orthonormal
    // completion so U stays orthogonal.
    let mut u = DMatrix::zeros(n, n);
    let mut completed: Vec<usize> = Vec::new();
    for c in 0..n {
        let s = sigma[c];
        if s > 0.0 {
            let col = b.column(order[c]) / s;
            u.set_column(c, &col);
        } else {
            completed.push(c);
        }
    }
    if !completed.is_empty() {
        let mut basis: Vec<DVector<f64>> = (0..n)
            .filter(|c| !completed.contains(c))
            .map(|c| u.column(c).into_owned())
            .collect();
        let mut fills: Vec<DVector<f64>> = Vec::new();
        for k in 0..n {
            if fills.len() == completed.len() {
                break;
            }
            let mut e = DVector::zeros(n);
            e[k] = 1.0;
            for _ in 0..2 {
                for bvec in basis.iter().chain(fills.iter()) {
                    let proj = bvec.dot(&e);
                    e -= bvec * proj;
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                fills.push(e / norm);
            }
        }
        for (slot, fill) in completed.iter().zip(fills) {
            u.set_column(*slot, &fill);
            basis.push(u.column(*slot).into_owned());
        }
    }

    (u, sigma, v_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SeededRng;

    fn reconstruction_error(m: &DMatrix<f64>, svd: &RobustSvd) -> f64 {
        let k = svd.singular_values.len();
        let s = DMatrix::from_fn(k, k, |i, j| if i == j { svd.singular_values[i] } else { 0.0 });
        (&svd.u * s * &svd.v_t - m).norm()
    }

    fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
        let k = m.ncols();
        (m.transpose() * m - DMatrix::identity(k, k)).norm()
    }

    #[test]
    fn random_matrices_decompose_accurately() {
        let mut rng = SeededRng::new(1);
        for &(rows, cols) in &[(5usize, 5usize), (8, 3), (3, 8), (10, 10), (1, 4), (4, 1)] {
            let m = rng.normal_matrix(rows, cols);
            let svd = RobustSvd::new(&m);
            let scale = m.norm().max(1.0);
            assert!(reconstruction_error(&m, &svd) < 1e-12 * scale, "{rows}x{cols}");
            assert!(orthogonality_defect(&svd.u) < 1e-12, "{rows}x{cols} U");
            assert!(orthogonality_defect(&svd.v_t.transpose()) < 1e-12, "{rows}x{cols} V");
            for w in svd.singular_values.as_slice().windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn rank_deficient_matrices_decompose_accurately() {
        // Regression guard: products of thin factors have exactly
        // dependent columns, the case where the backend SVD breaks.
        let mut rng = SeededRng::new(2);
        for trial in 0..20 {
            let r = 1 + trial % 3;
            let left = rng.normal_matrix(7, r);
            let right = rng.normal_matrix(r, 4);
            let m = &left * &right;
            let svd = RobustSvd::new(&m);
            assert!(reconstruction_error(&m, &svd) < 1e-12 * m.norm(), "trial {trial}");
            assert_eq!(svd.rank(1e-10), r, "trial {trial}");
            // Leading subspace captures all the energy.
            let u_r = svd.u.columns(0, r).into_owned();
            let resid = (&m - &u_r * (u_r.transpose() * &m)).norm();
            assert!(resid < 1e-12 * m.norm(), "trial {trial}: {resid}");
        }
    }

    #[test]
    fn zero_and_identity_edge_cases() {
        let z = DMatrix::<f64>::zeros(3, 5);
        let svd = RobustSvd::new(&z);
        assert!(svd.singular_values.iter().all(|&s| s == 0.0));
        assert!(orthogonality_defect(&svd.u) < 1e-14);

        let id = DMatrix::<f64>::identity(4, 4);
        let svd = RobustSvd::new(&id);
        assert!(svd.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-14));
        assert_eq!(operator_norm(&id), 1.0);
        assert_eq!(min_singular_value(&id), 1.0);
    }

    #[test]
    fn small_singular_values_have_high_relative_accuracy() {
        // diag(1, 1e-4, 1e-12) rotated by orthogonal factors on both
        // sides: the tiny singular value must come back with relative
        // accuracy, not just absolute.
        let mut rng = SeededRng::new(3);
        let q1 = rng.haar_orthogonal(3);
        let q2 = rng.haar_orthogonal(3);
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, 1e-4, 1e-12]));
        let m = q1 * d * q2;
        let sv = singular_values(&m);
        assert!((sv[0] - 1.0).abs() < 1e-12);
        assert!((sv[1] - 1e-4).abs() < 1e-10 * 1e-4, "{}", sv[1]);
        assert!((sv[2] - 1e-12).abs() < 1e-4 * 1e-12, "{}", sv[2]);
    }

    #[test]
    fn pseudo_inverse_solves_consistent_systems() {
        let mut rng = SeededRng::new(4);
        let left = rng.normal_matrix(6, 2);
        let right = rng.normal_matrix(2, 6);
        let m = &left * &right;
        let pinv = RobustSvd::new(&m).pseudo_inverse(1e-12);
        // M pinv M = M for the Moore-Penrose inverse.
        let err = (&m * &pinv * &m - &m).norm();
        assert!(err < 1e-10 * m.norm(), "{err}");
    }

    #[test]
    fn leading_subspace_of_compressed_low_rank_tensor_unfolding() {
        // End-to-end regression for the motivating failure: mode-3
        // unfolding of a rank-2 tensor compressed in modes 1 and 2.
        use crate::random_rank_r;
        let seed = 15903577452093862638u64;
        let (a, _) = random_rank_r(&mut SeededRng::new(seed), (7, 7, 7), 2).unwrap();
        let v1 = leading_left_singular_vectors(&a.unfold(1), 2);
        let w1 = a.modal_product(&v1.transpose(), 1).unwrap();
        let v2 = leading_left_singular_vectors(&w1.unfold(2), 2);
        let w2 = w1.modal_product(&v2.transpose(), 2).unwrap();
        let m3 = w2.unfold(3);
        let v3 = leading_left_singular_vectors(&m3, 2);
        let resid = (&m3 - &v3 * (v3.transpose() * &m3)).norm();
        assert!(resid < 1e-12 * m3.norm(), "{resid}");
    }
}
