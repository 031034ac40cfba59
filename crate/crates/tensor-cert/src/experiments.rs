//! The experiment reproductions emitted by the `experiment` subcommand.

use anyhow::{bail, Context, Result};
use cpd_approx::{cpd_als, AlsOptions};
use jge_bounds::{bauer_fike_sv_bound, multi_pencil_epsilon, multi_pencil_epsilon_over, SpecialCase};
use nalgebra::{DMatrix, DVector};
use pencil_jge::{spectral_variation, Line, Spectrum};
use rayon::prelude::*;
use tensor_core::{
    add_noise_at_snr, random_rank_r, synthesize, FactorTriple, SeededRng,
};

use crate::table::{ColumnKind, Table};

/// The available experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    /// Structured perturbations of the `C` factor: observed spectral
    /// variation against the coefficient-1 bound.
    SvStructured,
    /// Generic noise with a fitted rank-R approximation: observed
    /// spectral variation against the `sqrt(R)` bound.
    SvGeneric,
    /// Generic noise on full-size tensors, compared on Procrustes cores.
    SvProcrustes,
    /// Mean existence epsilon (in dB) as the unitary search grows.
    ExistenceRadius,
    /// Proportion of truncated multilinear SVDs certified to have a best
    /// rank-R approximation, per SNR.
    ExistenceProportion,
    /// Full-size, fitted, and Procrustes-core distances per SNR.
    ProcrustesDistances,
}

impl ExperimentName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sv-structured" => Self::SvStructured,
            "sv-generic" => Self::SvGeneric,
            "sv-procrustes" => Self::SvProcrustes,
            "existence-radius" => Self::ExistenceRadius,
            "existence-proportion" => Self::ExistenceProportion,
            "procrustes-distances" => Self::ProcrustesDistances,
            other => bail!(
                "unknown experiment {other:?}; expected one of sv-structured, sv-generic, \
                 sv-procrustes, existence-radius, existence-proportion, procrustes-distances"
            ),
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SvStructured => "sv-structured",
            Self::SvGeneric => "sv-generic",
            Self::SvProcrustes => "sv-procrustes",
            Self::ExistenceRadius => "existence-radius",
            Self::ExistenceProportion => "existence-proportion",
            Self::ProcrustesDistances => "procrustes-distances",
        }
    }

    /// Stable identifier mixed into per-trial seeds.
    fn id(&self) -> u64 {
        match self {
            Self::SvStructured => 1,
            Self::SvGeneric => 2,
            Self::SvProcrustes => 3,
            Self::ExistenceRadius => 4,
            Self::ExistenceProportion => 5,
            Self::ProcrustesDistances => 6,
        }
    }
}

/// Configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    /// Side length `I` of the cubical tensors (ignored by experiments
    /// that work at core size `R`).
    pub dim: usize,
    pub rank: usize,
    /// SNR grid in dB (unused by `existence-radius`).
    pub snr_grid: Vec<f64>,
    pub trials: usize,
    /// Number of random orthogonal slice mixes tried per certificate.
    pub n_unitaries: usize,
    pub reorder: bool,
    pub seed: u64,
}

/// Run an experiment and return its result table.
///
/// Per-trial randomness is `SeededRng::new(seed).child(&[experiment_id,
/// grid_index, trial_index])`, so rows are reproducible independently of
/// how trials are scheduled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Table> {
    if cfg.trials == 0 {
        bail!("at least one trial is required");
    }
    match cfg.experiment {
        ExperimentName::SvStructured => sv_structured(cfg),
        ExperimentName::SvGeneric => sv_generic(cfg),
        ExperimentName::SvProcrustes => sv_procrustes(cfg),
        ExperimentName::ExistenceRadius => existence_radius(cfg),
        ExperimentName::ExistenceProportion => existence_proportion(cfg),
        ExperimentName::ProcrustesDistances => procrustes_distances(cfg),
    }
}

fn trial_rng(cfg: &ExperimentConfig, grid: usize, trial: usize) -> SeededRng {
    SeededRng::new(cfg.seed).child(&[cfg.experiment.id(), grid as u64, trial as u64])
}

fn require_snr_grid(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.snr_grid.is_empty() {
        bail!("experiment {} needs a nonempty SNR grid", cfg.experiment.as_str());
    }
    Ok(())
}

/// Rescale a CPD so every `C` column has unit norm (norms absorbed into
/// the `A` columns); the spectral-variation bound assumes this
/// normalization. The represented tensor is unchanged.
fn normalize_c(f: &FactorTriple) -> Result<FactorTriple> {
    let mut a = f.a.clone();
    let mut c = f.c.clone();
    for col in 0..f.rank() {
        let n = c.column(col).norm();
        if n == 0.0 {
            bail!("zero C column; the eigenvalue lines are undefined");
        }
        let mut cc = c.column_mut(col);
        cc /= n;
        let mut ca = a.column_mut(col);
        ca *= n;
    }
    Ok(FactorTriple::new(a, f.b.clone(), c)?)
}

/// Lines spanned by the columns of a `C` factor, as a spectrum.
fn column_spectrum(c: &DMatrix<f64>) -> Result<Spectrum> {
    let lines = (0..c.ncols())
        .map(|col| Line::new(DVector::from_column_slice(c.column(col).as_slice())))
        .collect::<Result<Vec<_>, _>>()
        .context("zero C column has no line")?;
    Ok(Spectrum { lines, all_real: true, eigvectors: None })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Collect per-trial pairs `(log10 sv, log10 bound)` into a grid row.
fn sv_experiment_rows(
    cfg: &ExperimentConfig,
    table: &mut Table,
    trial_fn: impl Fn(usize, usize) -> Result<(f64, f64)> + Sync,
) -> Result<()> {
    for (g, &snr_db) in cfg.snr_grid.iter().enumerate() {
        let outcomes: Vec<Result<(f64, f64)>> =
            (0..cfg.trials).into_par_iter().map(|t| trial_fn(g, t)).collect();
        let mut svs = Vec::with_capacity(cfg.trials);
        let mut bounds = Vec::with_capacity(cfg.trials);
        for o in outcomes {
            let (sv, bound) = o?;
            svs.push(sv.log10());
            bounds.push(bound.log10());
        }
        table.push(vec![snr_db, mean(&svs), mean(&bounds)]);
    }
    Ok(())
}

const SV_COLUMNS: &[(&str, ColumnKind)] = &[
    ("snr_db", ColumnKind::Float),
    ("mean_log10_sv", ColumnKind::Float),
    ("mean_log10_bound", ColumnKind::Float),
];

/// Structured perturbations: `T = [[A, B, C]]`, `T^ = [[A, B, C + E]]`
/// with `E` scaled so that the SNR of `C` to `E` is as specified. The
/// shared-factor bound (coefficient 1) applies.
fn sv_structured(cfg: &ExperimentConfig) -> Result<Table> {
    require_snr_grid(cfg)?;
    let r = cfg.rank;
    let mut table = Table::new(cfg.experiment.as_str(), SV_COLUMNS);
    sv_experiment_rows(cfg, &mut table, |g, t| {
        let mut rng = trial_rng(cfg, g, t);
        // The bound assumes unit-norm C columns, so the factor being
        // perturbed is drawn directly in that normalization.
        let a = rng.normal_matrix(r, r);
        let b = rng.normal_matrix(r, r);
        let mut c = rng.normal_matrix(r, r);
        for col in 0..r {
            let n = c.column(col).norm();
            let mut cc = c.column_mut(col);
            cc /= n;
        }
        let f = FactorTriple::new(a, b, c)?;
        let tensor = synthesize(&f);
        let raw = rng.normal_matrix(r, r);
        let target = f.c.norm() * 10f64.powf(-cfg.snr_grid[g] / 20.0);
        let raw_norm = raw.norm();
        let e_mat = raw * (target / raw_norm);
        let perturbed = FactorTriple::new(f.a.clone(), f.b.clone(), &f.c + &e_mat)?;
        let e = synthesize(&perturbed).sub(&tensor)?;
        let bound = bauer_fike_sv_bound(&f, &e, SpecialCase::SharedFactor)?;
        let sv = spectral_variation(&column_spectrum(&f.c)?, &column_spectrum(&perturbed.c)?)?;
        Ok((sv, bound.value))
    })?;
    Ok(table)
}

/// Generic perturbations at core size: noise at the specified SNR, a
/// rank-R fit of the noisy tensor, and the `sqrt(R)` bound.
fn sv_generic(cfg: &ExperimentConfig) -> Result<Table> {
    require_snr_grid(cfg)?;
    let r = cfg.rank;
    let mut table = Table::new(cfg.experiment.as_str(), SV_COLUMNS);
    sv_experiment_rows(cfg, &mut table, |g, t| {
        let mut rng = trial_rng(cfg, g, t);
        let (tensor, raw_f) = random_rank_r(&mut rng, (r, r, r), r)?;
        let f = normalize_c(&raw_f)?;
        let (noisy, _) = add_noise_at_snr(&tensor, &mut rng, cfg.snr_grid[g])?;
        let fit = cpd_als(&noisy, r, &mut rng.child(&[0xa15]), AlsOptions::default())?;
        let fitted = synthesize(&fit.factors);
        let e = fitted.sub(&tensor)?;
        let bound = bauer_fike_sv_bound(&f, &e, SpecialCase::None)?;
        let sv = spectral_variation(&column_spectrum(&f.c)?, &column_spectrum(&fit.factors.c)?)?;
        Ok((sv, bound.value))
    })?;
    Ok(table)
}

/// Generic perturbations at full size, compared after a tensor
/// Procrustes compression of the ground truth and the fitted tensor.
fn sv_procrustes(cfg: &ExperimentConfig) -> Result<Table> {
    require_snr_grid(cfg)?;
    let (i, r) = (cfg.dim, cfg.rank);
    if r > i {
        bail!("rank {r} exceeds dimension {i}");
    }
    let mut table = Table::new(cfg.experiment.as_str(), SV_COLUMNS);
    sv_experiment_rows(cfg, &mut table, |g, t| {
        let mut rng = trial_rng(cfg, g, t);
        let (tprime, fprime) = random_rank_r(&mut rng, (i, i, i), r)?;
        let (noisy, _) = add_noise_at_snr(&tprime, &mut rng, cfg.snr_grid[g])?;
        let fit = cpd_als(&noisy, r, &mut rng.child(&[0xa15]), AlsOptions::default())?;
        let that_prime = synthesize(&fit.factors);
        let pair = tensor_compress::procrustes_pair_compress(&tprime, &that_prime, (r, r, r))?;
        // Ground-truth CPD of the core of T': push the factors through
        // the orthogonal compression.
        let core_f = normalize_c(&FactorTriple::new(
            pair.v[0].transpose() * &fprime.a,
            pair.v[1].transpose() * &fprime.b,
            pair.v[2].transpose() * &fprime.c,
        )?)?;
        let e = pair.what.sub(&pair.w)?;
        let bound = bauer_fike_sv_bound(&core_f, &e, SpecialCase::None)?;
        let core_fit = cpd_als(&pair.what, r, &mut rng.child(&[0xc03e]), AlsOptions::default())?;
        let sv = spectral_variation(
            &column_spectrum(&core_f.c)?,
            &column_spectrum(&core_fit.factors.c)?,
        )?;
        Ok((sv, bound.value))
    })?;
    Ok(table)
}

/// Milestones at which the unitary search progress is reported.
const RADIUS_MILESTONES: [usize; 4] = [1, 10, 100, 1000];

/// Mean multi-pencil epsilon of unit-norm rank-R `R x R x R` tensors as
/// a function of the number of random unitaries tried (the identity is
/// not included: the search is purely random, matching the protocol the
/// dB reference values come from).
fn existence_radius(cfg: &ExperimentConfig) -> Result<Table> {
    let r = cfg.rank;
    if cfg.n_unitaries == 0 {
        bail!("existence-radius needs at least one unitary");
    }
    let mut milestones: Vec<usize> = RADIUS_MILESTONES
        .iter()
        .copied()
        .filter(|&m| m <= cfg.n_unitaries)
        .collect();
    if milestones.last() != Some(&cfg.n_unitaries) {
        milestones.push(cfg.n_unitaries);
    }

    let per_trial: Vec<Result<Vec<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg, 0, t);
            let (tensor, _) = random_rank_r(&mut rng, (r, r, r), r)?;
            let mut sampler = rng.child(&[0x0172]);
            let unitaries: Vec<DMatrix<f64>> =
                (0..cfg.n_unitaries).map(|_| sampler.haar_orthogonal(r)).collect();
            let mut eps = Vec::with_capacity(milestones.len());
            for &m in &milestones {
                let mut probe = rng.child(&[0x0ee, m as u64]);
                let report = multi_pencil_epsilon_over(
                    &tensor,
                    &unitaries[..m],
                    &mut probe,
                    cfg.reorder,
                    m,
                )?;
                eps.push(report.epsilon);
            }
            Ok(eps)
        })
        .collect();

    let mut table = Table::new(
        cfg.experiment.as_str(),
        &[
            ("r", ColumnKind::Int),
            ("n_unitaries", ColumnKind::Int),
            ("mean_epsilon", ColumnKind::Float),
            ("mean_epsilon_db", ColumnKind::Float),
        ],
    );
    let mut sums = vec![0.0; milestones.len()];
    for trial in per_trial {
        for (s, e) in sums.iter_mut().zip(trial?) {
            *s += e;
        }
    }
    for (mi, &m) in milestones.iter().enumerate() {
        let mean_eps = sums[mi] / cfg.trials as f64;
        table.push(vec![r as f64, m as f64, mean_eps, -20.0 * mean_eps.log10()]);
    }
    Ok(table)
}

/// Proportion of truncated multilinear SVDs of noisy rank-R tensors for
/// which a best rank-R approximation is certified to exist: the rank-R
/// fit of the truncated core must land strictly inside the core's
/// multi-pencil epsilon.
fn existence_proportion(cfg: &ExperimentConfig) -> Result<Table> {
    require_snr_grid(cfg)?;
    let (i, r) = (cfg.dim, cfg.rank);
    if r > i {
        bail!("rank {r} exceeds dimension {i}");
    }
    let mut table = Table::new(
        cfg.experiment.as_str(),
        &[("snr_db", ColumnKind::Float), ("proportion_certified", ColumnKind::Float)],
    );
    for (g, &snr_db) in cfg.snr_grid.iter().enumerate() {
        let outcomes: Vec<Result<bool>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg, g, t);
                let (tprime, _) = random_rank_r(&mut rng, (i, i, i), r)?;
                let (noisy, _) = add_noise_at_snr(&tprime, &mut rng, snr_db)?;
                let w = tensor_compress::mlsvd_truncate(&noisy, (r, r, r))?.core;
                let report = multi_pencil_epsilon(
                    &w,
                    &mut rng.child(&[0x3b]),
                    cfg.n_unitaries,
                    cfg.reorder,
                )?;
                let fit = cpd_als(&w, r, &mut rng.child(&[0xf17]), AlsOptions::default())?;
                let core_fit = synthesize(&fit.factors).sub(&w)?.frobenius_norm();
                Ok(core_fit < report.epsilon)
            })
            .collect();
        let mut certified = 0usize;
        for o in outcomes {
            if o? {
                certified += 1;
            }
        }
        table.push(vec![snr_db, certified as f64 / cfg.trials as f64]);
    }
    Ok(table)
}

/// Mean distances per SNR: ground truth to noisy observation, ground
/// truth to fitted rank-R tensor, and between the Procrustes cores of
/// the ground truth and the fit.
fn procrustes_distances(cfg: &ExperimentConfig) -> Result<Table> {
    require_snr_grid(cfg)?;
    let (i, r) = (cfg.dim, cfg.rank);
    if r > i {
        bail!("rank {r} exceeds dimension {i}");
    }
    let mut table = Table::new(
        cfg.experiment.as_str(),
        &[
            ("snr_db", ColumnKind::Float),
            ("mean_dist_noisy", ColumnKind::Float),
            ("mean_dist_fit", ColumnKind::Float),
            ("mean_dist_cores", ColumnKind::Float),
        ],
    );
    for (g, &snr_db) in cfg.snr_grid.iter().enumerate() {
        let outcomes: Vec<Result<(f64, f64, f64)>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(cfg, g, t);
                let (tprime, _) = random_rank_r(&mut rng, (i, i, i), r)?;
                let (noisy, noise) = add_noise_at_snr(&tprime, &mut rng, snr_db)?;
                let fit = cpd_als(&noisy, r, &mut rng.child(&[0xa15]), AlsOptions::default())?;
                let that_prime = synthesize(&fit.factors);
                let pair =
                    tensor_compress::procrustes_pair_compress(&tprime, &that_prime, (r, r, r))?;
                Ok((
                    noise.frobenius_norm(),
                    that_prime.sub(&tprime)?.frobenius_norm(),
                    pair.compressed_distance,
                ))
            })
            .collect();
        let mut noisy_d = Vec::new();
        let mut fit_d = Vec::new();
        let mut core_d = Vec::new();
        for o in outcomes {
            let (a, b, c) = o?;
            noisy_d.push(a);
            fit_d.push(b);
            core_d.push(c);
        }
        table.push(vec![snr_db, mean(&noisy_d), mean(&fit_d), mean(&core_d)]);
    }
    Ok(table)
}
