//! The dense order-3 tensor type and its elementary operations.

use nalgebra::{DMatrix, DVector};

use crate::CoreError;
use serde::{Deserialize, Serialize};

/// Dense real third-order tensor.
///
/// Entries are stored mode-1 fastest: entry `(i, j, k)` is at linear
/// index `i + I1 * (j + I2 * k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    values: Vec<f64>,
}

impl Tensor3 {
    /// All-zero tensor of the given dimensions.
    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        assert!(
            dims.0 > 0 && dims.1 > 0 && dims.2 > 0,
            "tensor dimensions must be positive"
        );
        Self {
            dims,
            values: vec![0.0; dims.0 * dims.1 * dims.2],
        }
    }

    /// Build from a value vector in layout order (mode-1 fastest).
    pub fn from_values(dims: (usize, usize, usize), values: Vec<f64>) -> Result<Self, CoreError> {
        if values.len() != dims.0 * dims.1 * dims.2 {
            return Err(CoreError::DimensionMismatch(format!(
                "expected {} values for dims {:?}, got {}",
                dims.0 * dims.1 * dims.2,
                dims,
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    /// Build entrywise from a function of the index `(i, j, k)`.
    pub fn from_fn(
        dims: (usize, usize, usize),
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut t = Self::zeros(dims);
        for k in 0..dims.2 {
            for j in 0..dims.1 {
                for i in 0..dims.0 {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Build an `R x R x K` tensor from its frontal slices.
    pub fn from_slices(slices: &[DMatrix<f64>]) -> Result<Self, CoreError> {
        let k = slices.len();
        if k == 0 {
            return Err(CoreError::InvalidArgument("no slices given".into()));
        }
        let (r1, r2) = (slices[0].nrows(), slices[0].ncols());
        for s in slices {
            if s.nrows() != r1 || s.ncols() != r2 {
                return Err(CoreError::DimensionMismatch(
                    "frontal slices must share dimensions".into(),
                ));
            }
        }
        Ok(Self::from_fn((r1, r2, k), |i, j, kk| slices[kk][(i, j)]))
    }

    /// Tensor dimensions `(I1, I2, I3)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    /// Dimension of the given mode (1, 2, or 3).
    pub fn dim(&self, mode: usize) -> usize {
        match mode {
            1 => self.dims.0,
            2 => self.dims.1,
            3 => self.dims.2,
            _ => panic!("mode must be 1, 2, or 3"),
        }
    }

    /// Entries in layout order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `k`-th frontal slice `T(:,:,k)` as a matrix.
    pub fn frontal_slice(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dims.0, self.dims.1, |i, j| self[(i, j, k)])
    }

    /// All frontal slices.
    pub fn frontal_slices(&self) -> Vec<DMatrix<f64>> {
        (0..self.dims.2).map(|k| self.frontal_slice(k)).collect()
    }

    /// Mode-`mode` unfolding.
    ///
    /// Row index is the mode-`mode` index; columns are the mode-`mode`
    /// fibers ordered lexicographically in the remaining modes with the
    /// lower-numbered mode fastest:
    /// mode 1 -> column `j + I2 * k`; mode 2 -> column `i + I1 * k`;
    /// mode 3 -> column `i + I1 * j`.
    pub fn unfold(&self, mode: usize) -> DMatrix<f64> {
        let (i1, i2, i3) = self.dims;
        match mode {
            1 => DMatrix::from_fn(i1, i2 * i3, |i, c| self[(i, c % i2, c / i2)]),
            2 => DMatrix::from_fn(i2, i1 * i3, |j, c| self[(c % i1, j, c / i1)]),
            3 => DMatrix::from_fn(i3, i1 * i2, |k, c| self[(c % i1, c / i1, k)]),
            _ => panic!("mode must be 1, 2, or 3"),
        }
    }

    /// Inverse of [`Tensor3::unfold`]: rebuild a tensor of dimensions
    /// `dims` from its mode-`mode` unfolding.
    pub fn refold(
        unfolded: &DMatrix<f64>,
        mode: usize,
        dims: (usize, usize, usize),
    ) -> Result<Self, CoreError> {
        let (i1, i2, i3) = dims;
        let expected = match mode {
            1 => (i1, i2 * i3),
            2 => (i2, i1 * i3),
            3 => (i3, i1 * i2),
            _ => panic!("mode must be 1, 2, or 3"),
        };
        if (unfolded.nrows(), unfolded.ncols()) != expected {
            return Err(CoreError::DimensionMismatch(format!(
                "unfolding of dims {dims:?} in mode {mode} must be {expected:?}, got {}x{}",
                unfolded.nrows(),
                unfolded.ncols()
            )));
        }
        Ok(Self::from_fn(dims, |i, j, k| match mode {
            1 => unfolded[(i, j + i2 * k)],
            2 => unfolded[(j, i + i1 * k)],
            _ => unfolded[(k, i + i1 * j)],
        }))
    }

    /// Mode-`mode` product with a matrix `M` (`M` has `dims[mode]`
    /// columns): every mode-`mode` fiber is mapped through `M`.
    pub fn modal_product(&self, m: &DMatrix<f64>, mode: usize) -> Result<Self, CoreError> {
        if m.ncols() != self.dim(mode) {
            return Err(CoreError::DimensionMismatch(format!(
                "mode-{mode} product: matrix has {} columns, tensor dimension is {}",
                m.ncols(),
                self.dim(mode)
            )));
        }
        let mapped = m * self.unfold(mode);
        let mut dims = self.dims;
        match mode {
            1 => dims.0 = m.nrows(),
            2 => dims.1 = m.nrows(),
            _ => dims.2 = m.nrows(),
        }
        Self::refold(&mapped, mode, dims)
    }

    /// Slice mix `sum_k v_k T(:,:,k)`, i.e. the single frontal slice of
    /// the mode-3 product with the row vector `v^T`.
    pub fn slice_mix(&self, v: &DVector<f64>) -> Result<DMatrix<f64>, CoreError> {
        if v.len() != self.dims.2 {
            return Err(CoreError::DimensionMismatch(format!(
                "slice mix: vector length {} vs {} slices",
                v.len(),
                self.dims.2
            )));
        }
        let mut out = DMatrix::zeros(self.dims.0, self.dims.1);
        for k in 0..self.dims.2 {
            out += v[k] * self.frontal_slice(k);
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius inner product with another tensor of the same dims.
    pub fn frobenius_inner(&self, other: &Tensor3) -> Result<f64, CoreError> {
        if self.dims != other.dims {
            return Err(CoreError::DimensionMismatch(format!(
                "inner product of dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Entrywise sum with another tensor of the same dims.
    pub fn add(&self, other: &Tensor3) -> Result<Tensor3, CoreError> {
        self.zip_map(other, |a, b| a + b)
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3, CoreError> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Entrywise scaling.
    pub fn scale(&self, s: f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            values: self.values.iter().map(|x| s * x).collect(),
        }
    }

    fn zip_map(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3, CoreError> {
        if self.dims != other.dims {
            return Err(CoreError::DimensionMismatch(format!(
                "entrywise op on dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Tensor3 {
            dims: self.dims,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl std::ops::Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.values[i + self.dims.0 * (j + self.dims.1 * k)]
    }
}

impl std::ops::IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.values[i + self.dims.0 * (j + self.dims.1 * k)]
    }
}

/// Outer product `a ⊗ b ⊗ c`: entry `(i, j, k)` equals `a_i * b_j * c_k`.
pub fn outer3(a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>) -> Result<Tensor3, CoreError> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(CoreError::InvalidArgument(
            "outer product of a zero-length vector".into(),
        ));
    }
    Ok(Tensor3::from_fn((a.len(), b.len(), c.len()), |i, j, k| {
        a[i] * b[j] * c[k]
    }))
}
