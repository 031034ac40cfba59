//! Report types serialized by the command-line tools.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Schema version stamped into serialized reports.
pub const SCHEMA_VERSION: u32 = 1;

/// Outcome of a certificate computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The certificate holds (strict inequalities satisfied).
    Certified,
    /// The certificate could not be established; nothing is implied
    /// about the negation.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Certified => write!(f, "Certified"),
            Verdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// Reproducibility metadata carried by every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub schema_version: u32,
    pub seed: u64,
    pub n_unitaries: usize,
    pub reorder: bool,
    pub tol: f64,
}

/// Per-subpencil diagnostics for one slice pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PencilDetail {
    /// 1-based indices of the paired slices.
    pub pair: (usize, usize),
    pub sigma_min_a: f64,
    pub sigma_min_b: f64,
    /// Smallest pairwise chordal distance between the eigenvalue lines.
    pub min_chordal_gap: f64,
    pub epsilon_i: f64,
    /// Pencil verdict (`Simple`, `RepeatedEigenvalue`, ...).
    pub diagnosis: String,
}

/// A multi-pencil existence certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Per-subpencil epsilon values of the winning configuration.
    pub epsilon_vector: Vec<f64>,
    /// `l2` norm of `epsilon_vector`.
    pub epsilon: f64,
    /// `epsilon / 2`: radius of the certified open ball.
    pub existence_radius: f64,
    /// The orthogonal slice mix of the winning configuration.
    pub unitary: DMatrix<f64>,
    /// Disjoint 1-based slice pairs of the winning configuration.
    pub pairing: Vec<(usize, usize)>,
    pub per_pencil: Vec<PencilDetail>,
    pub verdict: Verdict,
    pub meta: ReportMeta,
}

/// Certificate for a measured (noisy, full-size) tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasuredCertificate {
    /// `|M' - W'|_F`: truncation error of the multilinear SVD.
    pub mlsvd_error: f64,
    /// `|M' - T~'|_F`: distance from the measurement to the fitted
    /// rank-`R` tensor.
    pub fit_error: f64,
    /// `|W - T~|_F`: core-level fit error.
    pub core_fit_error: f64,
    /// Existence epsilon computed on the compressed core.
    pub epsilon: f64,
    /// `epsilon - mlsvd_error - fit_error`; certified iff positive.
    pub slack: f64,
    pub verdict: Verdict,
    /// The underlying multi-pencil report for the core.
    pub core_report: BoundReport,
}
