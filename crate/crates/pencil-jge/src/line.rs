//! Lines in `R^K` (JGE values) and multisets of them (spectra).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::JgeError;

/// A one-dimensional subspace of `R^K`, stored as a unit representative
/// with canonical sign: the first nonzero coordinate is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    rep: DVector<f64>,
}

impl Line {
    /// Build a line from any nonzero vector; the stored representative is
    /// normalized and sign-canonicalized.
    pub fn new(v: DVector<f64>) -> Result<Self, JgeError> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(JgeError::InvalidArgument(
                "a line needs a nonzero finite representative".into(),
            ));
        }
        let mut rep = v / norm;
        if let Some(first) = rep.iter().find(|x| **x != 0.0) {
            if *first < 0.0 {
                rep = -rep;
            }
        }
        Ok(Self { rep })
    }

    /// Convenience constructor from a slice.
    pub fn from_slice(v: &[f64]) -> Result<Self, JgeError> {
        Self::new(DVector::from_column_slice(v))
    }

    /// The unit representative (canonical sign).
    pub fn rep(&self) -> &DVector<f64> {
        &self.rep
    }

    /// Ambient dimension `K`.
    pub fn dim(&self) -> usize {
        self.rep.len()
    }
}

/// A multiset of lines in `R^K`, optionally carrying the JGE vectors
/// that produced them (as unit columns of a square matrix).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub lines: Vec<Line>,
    /// True when every underlying eigenvalue passed the realness test.
    pub all_real: bool,
    /// Unit-column matrix of JGE vectors `x_r`, when available.
    pub eigvectors: Option<DMatrix<f64>>,
}

impl Spectrum {
    /// Number of lines counting multiplicity.
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    /// True when the spectrum holds no lines.
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Ambient dimension `K` of the lines (panics on an empty spectrum).
    pub fn dim(&self) -> usize {
        self.lines[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn representative_is_unit_and_sign_canonical() {
        let l = Line::from_slice(&[-3.0, 4.0]).unwrap();
        assert_relative_eq!(l.rep().norm(), 1.0, epsilon = 1e-12);
        assert!(l.rep()[0] > 0.0);
        assert_relative_eq!(l.rep()[0], 0.6, epsilon = 1e-12);
        assert_relative_eq!(l.rep()[1], -0.8, epsilon = 1e-12);
    }

    #[test]
    fn leading_zero_sign_rule() {
        let l = Line::from_slice(&[0.0, -2.0, 1.0]).unwrap();
        assert!(l.rep()[1] > 0.0);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(Line::from_slice(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn opposite_representatives_are_equal() {
        let a = Line::from_slice(&[1.0, -2.0]).unwrap();
        let b = Line::from_slice(&[-1.0, 2.0]).unwrap();
        assert_eq!(a, b);
    }
}
