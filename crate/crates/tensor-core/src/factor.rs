//! CPD factor triples, synthesis, random generation, and noise.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{CoreError, SeededRng, Tensor3};

/// Factor matrices `(A, B, C)` of a canonical polyadic decomposition.
///
/// `A` is `I1 x R`, `B` is `I2 x R`, `C` is `I3 x R`; the represented
/// tensor is `sum_r a_r ⊗ b_r ⊗ c_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorTriple {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl FactorTriple {
    /// Build a factor triple, checking that the column counts agree and
    /// are positive.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self, CoreError> {
        let r = a.ncols();
        if r == 0 {
            return Err(CoreError::InvalidArgument("rank must be positive".into()));
        }
        if b.ncols() != r || c.ncols() != r {
            return Err(CoreError::DimensionMismatch(format!(
                "factor column counts differ: {} / {} / {}",
                a.ncols(),
                b.ncols(),
                c.ncols()
            )));
        }
        Ok(Self { a, b, c })
    }

    /// Number of rank-one terms.
    pub fn rank(&self) -> usize {
        self.a.ncols()
    }

    /// Dimensions of the synthesized tensor.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.a.nrows(), self.b.nrows(), self.c.nrows())
    }

    /// The `k`-th diagonal slice `D_k(C) = diag(C(k, :))`.
    pub fn diagonal_slice(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.c.row(k).transpose())
    }

    /// Khatri–Rao product `C ⊙ B` (columnwise Kronecker, `c_r` slowest),
    /// so that the mode-1 unfolding of the synthesized tensor is
    /// `A (C ⊙ B)^T`.
    pub fn khatri_rao_cb(&self) -> DMatrix<f64> {
        khatri_rao(&self.c, &self.b)
    }
}

/// Columnwise Kronecker product: column `r` is `kron(x_r, y_r)` (entries
/// `x_k * y_j` at row `j + nrows(y) * k`).
pub fn khatri_rao(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(x.ncols(), y.ncols(), "khatri-rao column mismatch");
    let (nx, ny, r) = (x.nrows(), y.nrows(), x.ncols());
    DMatrix::from_fn(nx * ny, r, |row, col| x[(row / ny, col)] * y[(row % ny, col)])
}

/// Synthesize the tensor `sum_r a_r ⊗ b_r ⊗ c_r` from its factors.
pub fn synthesize(f: &FactorTriple) -> Tensor3 {
    let (i1, i2, i3) = f.dims();
    let r = f.rank();
    Tensor3::from_fn((i1, i2, i3), |i, j, k| {
        (0..r).map(|t| f.a[(i, t)] * f.b[(j, t)] * f.c[(k, t)]).sum()
    })
}

/// Generate a random rank-`R` tensor with i.i.d. standard-normal factors
/// scaled so the synthesized tensor has unit Frobenius norm; returns the
/// tensor together with its ground-truth factors.
///
/// `R > min(dims)` is permitted (the result is then generically not of
/// multilinear rank `(R, R, R)`); callers that care should check.
pub fn random_rank_r(
    rng: &mut SeededRng,
    dims: (usize, usize, usize),
    r: usize,
) -> Result<(Tensor3, FactorTriple), CoreError> {
    if r == 0 {
        return Err(CoreError::InvalidArgument("rank must be positive".into()));
    }
    let a = rng.normal_matrix(dims.0, r);
    let b = rng.normal_matrix(dims.1, r);
    let c = rng.normal_matrix(dims.2, r);
    let raw = FactorTriple::new(a, b, c)?;
    let norm = synthesize(&raw).frobenius_norm();
    if norm == 0.0 {
        return Err(CoreError::InvalidArgument(
            "degenerate zero draw; use a different seed".into(),
        ));
    }
    // Distribute the normalization evenly over the three factors so the
    // synthesized tensor has unit norm.
    let s = norm.powf(-1.0 / 3.0);
    let f = FactorTriple::new(raw.a * s, raw.b * s, raw.c * s)?;
    Ok((synthesize(&f), f))
}

/// Add i.i.d. standard-normal noise scaled to an exact signal-to-noise
/// ratio `20*log10(|T|_F / |N|_F) = snr_db`; returns `(T + N, N)`.
pub fn add_noise_at_snr(
    t: &Tensor3,
    rng: &mut SeededRng,
    snr_db: f64,
) -> Result<(Tensor3, Tensor3), CoreError> {
    let signal = t.frobenius_norm();
    if signal == 0.0 {
        return Err(CoreError::InvalidArgument(
            "cannot set an SNR against a zero signal".into(),
        ));
    }
    let raw = Tensor3::from_fn(t.dims(), |_, _, _| rng.normal());
    let raw_norm = raw.frobenius_norm();
    if raw_norm == 0.0 {
        return Err(CoreError::InvalidArgument(
            "degenerate zero noise draw".into(),
        ));
    }
    let target = signal * 10f64.powf(-snr_db / 20.0);
    let noise = raw.scale(target / raw_norm);
    Ok((t.add(&noise)?, noise))
}
