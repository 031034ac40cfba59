//! Generalized eigenstructure of `R x R x 2` pencils and the Jennrich
//! decomposition built on it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use tensor_core::{khatri_rao, FactorTriple, SeededRng, Tensor3};

use crate::{chordal, JgeError, Line, Spectrum};

/// Outcome of diagnosing an `R x R x 2` pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PencilVerdict {
    /// Slice mix invertible with `R` distinct real generalized
    /// eigenvalues: the pencil has rank `R` and a recoverable CPD.
    Simple,
    /// Two generalized eigenvalues coincide within tolerance.
    RepeatedEigenvalue,
    /// Some generalized eigenvalue is not real.
    ComplexSpectrum,
    /// No sampled slice mix was invertible.
    NotSliceMixInvertible,
}

/// Diagnosis of a pencil: verdict, spectrum when computable, and the
/// recovered CPD when (and only when) the pencil is simple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilDiagnosis {
    pub verdict: PencilVerdict,
    pub spectrum: Option<Spectrum>,
    pub cpd: Option<FactorTriple>,
}

impl PencilDiagnosis {
    fn bare(verdict: PencilVerdict) -> Self {
        Self { verdict, spectrum: None, cpd: None }
    }
}

fn require_pencil(p: &Tensor3) -> Result<usize, JgeError> {
    let (i1, i2, i3) = p.dims();
    if i1 != i2 {
        return Err(JgeError::DimensionMismatch(format!(
            "square frontal slices required, got {i1}x{i2}"
        )));
    }
    if i3 != 2 {
        return Err(JgeError::DimensionMismatch(format!(
            "a pencil has exactly 2 frontal slices, got {i3}"
        )));
    }
    Ok(i1)
}

fn sigma_min(m: &DMatrix<f64>) -> f64 {
    tensor_core::min_singular_value(m)
}

/// Compute the generalized eigenstructure of an `R x R x 2` pencil.
///
/// A well-conditioned slice mix `G = v1 T1 + v2 T2` is selected from a
/// few deterministic and sampled candidates (the one with the largest
/// smallest singular value); the reduction `G^{-1} H` with `H` the mix
/// along the rotated direction `w ⟂ v` then carries the generalized
/// eigenvalues. Verdicts:
///
/// * `NotSliceMixInvertible` — no candidate mix had
///   `σ_min > tol * |P|_F`;
/// * `ComplexSpectrum` — some eigenvalue `μ` of `G^{-1} H` has
///   `|Im μ| > tol * (1 + |Re μ|)`;
/// * `RepeatedEigenvalue` — two eigenvalue lines are closer than `tol`
///   in the chordal metric;
/// * `Simple` — otherwise; the spectrum carries unit JGE vectors.
pub fn pencil_spectrum(
    p: &Tensor3,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<PencilDiagnosis, JgeError> {
    let r = require_pencil(p)?;
    let scale = p.frobenius_norm();
    if scale == 0.0 {
        return Ok(PencilDiagnosis::bare(PencilVerdict::NotSliceMixInvertible));
    }

    // Candidate mixing directions: axis mixes, the diagonal, and a few
    // random unit vectors; keep the best conditioned mix.
    let mut candidates = vec![
        DVector::from_column_slice(&[1.0, 0.0]),
        DVector::from_column_slice(&[0.0, 1.0]),
        DVector::from_column_slice(&[std::f64::consts::FRAC_1_SQRT_2; 2]),
    ];
    for _ in 0..8 {
        candidates.push(rng.normal_vector(2).normalize());
    }
    let (v, best_sigma) = candidates
        .into_iter()
        .map(|v| {
            let s = sigma_min(&p.slice_mix(&v).unwrap());
            (v, s)
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    if best_sigma <= tol * scale {
        return Ok(PencilDiagnosis::bare(PencilVerdict::NotSliceMixInvertible));
    }

    // H mixes along the direction orthogonal to v; (v, w) is then an
    // orthonormal basis, so eigen-lines map back through it exactly.
    let w = DVector::from_column_slice(&[-v[1], v[0]]);
    let g = p.slice_mix(&v)?;
    let h = p.slice_mix(&w)?;
    let g_lu = g.clone().lu();
    let m = g_lu
        .solve(&h)
        .ok_or_else(|| JgeError::InvalidArgument("selected slice mix was singular".into()))?;

    let eigenvalues = m.clone().complex_eigenvalues();
    if eigenvalues
        .iter()
        .any(|mu| mu.im.abs() > tol * (1.0 + mu.re.abs()))
    {
        return Ok(PencilDiagnosis::bare(PencilVerdict::ComplexSpectrum));
    }

    // Real spectrum: recover a unit eigenvector per eigenvalue from the
    // nullspace of M - mu I, then map each eigenpair to its line in R^2.
    let t1 = p.frontal_slice(0);
    let t2 = p.frontal_slice(1);
    let mut lines = Vec::with_capacity(r);
    let mut eigvectors = DMatrix::zeros(r, r);
    for (idx, mu) in eigenvalues.iter().enumerate() {
        let shifted = &m - DMatrix::from_diagonal_element(r, r, mu.re);
        let svd = tensor_core::RobustSvd::new(&shifted);
        let x = svd.v_t.row(r - 1).transpose();
        let u1 = &t1 * &x;
        let u2 = &t2 * &x;
        let y = if u1.norm() >= u2.norm() { u1.normalize() } else { u2.normalize() };
        let lambda = DVector::from_column_slice(&[y.dot(&u1), y.dot(&u2)]);
        lines.push(Line::new(lambda)?);
        eigvectors.set_column(idx, &x);
    }

    let mut repeated = false;
    for i in 0..r {
        for j in (i + 1)..r {
            if chordal(&lines[i], &lines[j])? <= tol {
                repeated = true;
            }
        }
    }

    let spectrum = Spectrum { lines, all_real: true, eigvectors: Some(eigvectors) };
    let verdict = if repeated {
        PencilVerdict::RepeatedEigenvalue
    } else {
        PencilVerdict::Simple
    };
    Ok(PencilDiagnosis { verdict, spectrum: Some(spectrum), cpd: None })
}

/// Recover a CPD of a simple `R x R x 2` pencil via its generalized
/// eigendecomposition.
///
/// For a simple pencil the JGE values are the spans of the columns of
/// `C` and the columns of `B^{-T}` are JGE vectors, so `B` is the
/// inverse transpose of the eigenvector matrix, the rows of `C` come
/// from the eigenvalue lines (columns unit norm), and `A` is recovered
/// by least squares from the mode-1 unfolding `A (C ⊙ B)^T`. The
/// returned diagnosis carries the CPD iff the verdict is `Simple`.
pub fn jennrich_pencil_cpd(
    p: &Tensor3,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<PencilDiagnosis, JgeError> {
    let r = require_pencil(p)?;
    let mut diag = pencil_spectrum(p, rng, tol)?;
    if diag.verdict != PencilVerdict::Simple {
        return Ok(diag);
    }
    let spectrum = diag.spectrum.as_ref().expect("simple verdict has a spectrum");
    let x = spectrum.eigvectors.as_ref().expect("simple verdict has eigenvectors");

    let b = x.transpose().try_inverse().ok_or_else(|| {
        JgeError::InvalidArgument("eigenvector matrix numerically singular".into())
    })?;
    let mut c = DMatrix::zeros(2, r);
    for (idx, line) in spectrum.lines.iter().enumerate() {
        c.set_column(idx, line.rep());
    }

    // A = unfold1(P) * KR * (KR^T KR)^{-1} with KR = C ⊙ B.
    let kr = khatri_rao(&c, &b);
    let gram = kr.transpose() * &kr;
    let rhs = kr.transpose() * p.unfold(1).transpose();
    let a_t = gram.lu().solve(&rhs).ok_or_else(|| {
        JgeError::InvalidArgument("normal equations singular in factor recovery".into())
    })?;
    let a = a_t.transpose();

    diag.cpd = Some(FactorTriple::new(a, b, c)?);
    Ok(diag)
}
