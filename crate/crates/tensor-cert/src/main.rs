//! Certificates for best low-rank tensor approximations, on the command
//! line.
//!
//! Exit codes: `0` when a certificate holds, `2` when the computation
//! succeeded but nothing could be certified, `1` on errors.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cpd_approx::AlsOptions;
use jge_bounds::{
    certify_neighborhood, matching_distance_bound, mlsvd_existence_check,
    pencil_existence_epsilon, CertifyOptions, ErrorNorm, Verdict,
};
use tensor_cert::{run_experiment, ExperimentConfig, ExperimentName};
use tensor_core::{
    add_noise_at_snr, io::read_tensor, io::write_tensor, random_rank_r, FactorTriple, SeededRng,
};

#[derive(Parser)]
#[command(
    name = "tensor-cert",
    about = "Deterministic existence/uniqueness certificates for best rank-R tensor \
             approximations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed for all randomized computations.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Relative singular-value threshold for numerical rank decisions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rank: f64,

    /// Simplicity threshold for pencil spectra (chordal gap / realness).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_gap: f64,

    /// Convergence tolerance of the alternating least-squares fits.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_als: f64,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (default: json, except `experiment` which defaults
    /// to csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random rank-R tensor file (plus factors, and a noisy
    /// copy when --snr-db is given).
    Gen(GenArgs),
    /// Certify an existence neighborhood of a tensor file.
    Certify(CertifyArgs),
    /// Single-pencil epsilon of an R x R x 2 tensor file, optionally
    /// with a matching-distance bound against a second file.
    PencilBound(PencilBoundArgs),
    /// Measured-tensor certificate through the truncated multilinear
    /// SVD.
    MlsvdCheck(MlsvdCheckArgs),
    /// Jointly compress two tensor files and report the distance
    /// contraction.
    Procrustes(ProcrustesArgs),
    /// Run one of the reproducible experiments and emit its table.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Dimensions, e.g. 8,8,8 or 8x8x8.
    #[arg(long)]
    dims: String,
    #[arg(long)]
    rank: usize,
    /// Output prefix: writes <prefix>.tensor and <prefix>.factors.json.
    #[arg(long = "out-prefix")]
    out_prefix: PathBuf,
    /// Also write <prefix>.noisy.tensor and <prefix>.noise.tensor at
    /// this SNR (dB).
    #[arg(long)]
    snr_db: Option<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    tensor_file: PathBuf,
    #[arg(long)]
    rank: usize,
    /// Treat the input as a noisy measurement (truncated-MLSVD path)
    /// instead of an exactly low-multilinear-rank tensor.
    #[arg(long)]
    measured: bool,
    #[arg(long, default_value_t = 100)]
    n_unitaries: usize,
    /// Optimize the slice pairing exhaustively per mix.
    #[arg(long)]
    reorder: bool,
}

#[derive(Args)]
struct PencilBoundArgs {
    tensor_file: PathBuf,
    /// Second tensor file: also bound the matching distance between the
    /// two spectra.
    #[arg(long)]
    against: Option<PathBuf>,
}

#[derive(Args)]
struct MlsvdCheckArgs {
    tensor_file: PathBuf,
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 100)]
    n_unitaries: usize,
    #[arg(long)]
    reorder: bool,
}

#[derive(Args)]
struct ProcrustesArgs {
    tensor_file: PathBuf,
    other_file: PathBuf,
    #[arg(long)]
    rank: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: sv-structured, sv-generic, sv-procrustes,
    /// existence-radius, existence-proportion, procrustes-distances.
    #[arg(long)]
    name: String,
    /// Side length of the cubical test tensors (where applicable).
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long)]
    rank: usize,
    /// Comma-separated SNR grid in dB, e.g. 0,5,10 (unused by
    /// existence-radius).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_grid: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 100)]
    n_unitaries: usize,
    #[arg(long)]
    reorder: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Certify(args) => cmd_certify(cli, args),
        Command::PencilBound(args) => cmd_pencil_bound(cli, args),
        Command::MlsvdCheck(args) => cmd_mlsvd_check(cli, args),
        Command::Procrustes(args) => cmd_procrustes(cli, args),
        Command::Experiment(args) => cmd_experiment(cli, args),
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = s.split([',', 'x']).collect();
    if parts.len() != 3 {
        bail!("dims must be three integers like 8,8,8 (got {s:?})");
    }
    let mut d = [0usize; 3];
    for (out, p) in d.iter_mut().zip(&parts) {
        *out = p.trim().parse().with_context(|| format!("bad dimension {p:?}"))?;
        if *out == 0 {
            bail!("dimensions must be positive");
        }
    }
    Ok((d[0], d[1], d[2]))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn exit_for(verdict: Verdict) -> ExitCode {
    match verdict {
        Verdict::Certified => ExitCode::from(0),
        Verdict::Inconclusive => ExitCode::from(2),
    }
}

fn als_options(cli: &Cli) -> AlsOptions {
    AlsOptions { tol: cli.tol_als, ..AlsOptions::default() }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode> {
    let dims = parse_dims(&args.dims)?;
    let min_dim = dims.0.min(dims.1).min(dims.2);
    if args.rank > min_dim {
        eprintln!(
            "warning: rank {} exceeds the smallest dimension {min_dim}; the generated tensor \
             will not be identifiable from its slices",
            args.rank
        );
    }
    let mut rng = SeededRng::new(cli.seed);
    let (tensor, factors) = random_rank_r(&mut rng, dims, args.rank)?;

    let prefix = args.out_prefix.as_os_str().to_string_lossy().into_owned();
    write_tensor(Path::new(&format!("{prefix}.tensor")), &tensor)?;
    let factors_json = serde_json::to_string_pretty(&factors)?;
    std::fs::write(format!("{prefix}.factors.json"), factors_json + "\n")?;

    if let Some(snr_db) = args.snr_db {
        let (noisy, noise) = add_noise_at_snr(&tensor, &mut rng, snr_db)?;
        write_tensor(Path::new(&format!("{prefix}.noisy.tensor")), &noisy)?;
        write_tensor(Path::new(&format!("{prefix}.noise.tensor")), &noise)?;
    }
    Ok(ExitCode::from(0))
}

fn cmd_certify(cli: &Cli, args: &CertifyArgs) -> Result<ExitCode> {
    let tensor = read_tensor(&args.tensor_file)
        .with_context(|| format!("reading {}", args.tensor_file.display()))?;
    let opts = CertifyOptions {
        rank_tol: cli.tol_rank,
        n_unitaries: args.n_unitaries,
        reorder: args.reorder,
        als: als_options(cli),
    };
    let mut rng = SeededRng::new(cli.seed);
    let (json, verdict) = if args.measured {
        let cert = mlsvd_existence_check(&tensor, args.rank, &mut rng, opts)?;
        (serde_json::to_string_pretty(&cert)?, cert.verdict)
    } else {
        let report = certify_neighborhood(&tensor, args.rank, &mut rng, opts)?;
        (serde_json::to_string_pretty(&report)?, report.verdict)
    };
    emit(cli.out.as_deref(), &(json + "\n"))?;
    Ok(exit_for(verdict))
}

fn cmd_pencil_bound(cli: &Cli, args: &PencilBoundArgs) -> Result<ExitCode> {
    let pencil = read_tensor(&args.tensor_file)
        .with_context(|| format!("reading {}", args.tensor_file.display()))?;
    let mut rng = SeededRng::new(cli.seed);
    let (epsilon, detail) = pencil_existence_epsilon(&pencil, &mut rng, cli.tol_gap)?;

    let mut verdict = if epsilon > 0.0 { Verdict::Certified } else { Verdict::Inconclusive };
    let mut md_bound = None;
    if let Some(other_path) = &args.against {
        let other = read_tensor(other_path)
            .with_context(|| format!("reading {}", other_path.display()))?;
        if verdict == Verdict::Certified {
            let f = normalized_pencil_cpd(&pencil, &mut rng, cli.tol_gap)?;
            let bound = matching_distance_bound(&pencil, &f, &other, ErrorNorm::Frobenius)?;
            if !bound.certified {
                verdict = Verdict::Inconclusive;
            }
            md_bound = Some(bound);
        }
    }

    let json = serde_json::to_string_pretty(&serde_json::json!({
        "epsilon": epsilon,
        "existence_radius": epsilon / 2.0,
        "detail": detail,
        "md_bound": md_bound,
        "verdict": verdict,
        "seed": cli.seed,
        "tol": cli.tol_gap,
    }))?;
    emit(cli.out.as_deref(), &(json + "\n"))?;
    Ok(exit_for(verdict))
}

/// Jennrich CPD of a simple pencil with the `C` column norms absorbed
/// into `A`, as required by the matching-distance threshold.
fn normalized_pencil_cpd(
    pencil: &tensor_core::Tensor3,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<FactorTriple> {
    let diagnosis = pencil_jge::jennrich_pencil_cpd(pencil, rng, tol)?;
    let Some(f) = diagnosis.cpd else {
        bail!("the pencil is not simple ({:?}); no CPD is available", diagnosis.verdict);
    };
    let mut a = f.a.clone();
    let mut c = f.c.clone();
    for col in 0..f.rank() {
        let n = c.column(col).norm();
        if n == 0.0 {
            bail!("zero C column in the recovered CPD");
        }
        let mut cc = c.column_mut(col);
        cc /= n;
        let mut ca = a.column_mut(col);
        ca *= n;
    }
    Ok(FactorTriple::new(a, f.b, c)?)
}

fn cmd_mlsvd_check(cli: &Cli, args: &MlsvdCheckArgs) -> Result<ExitCode> {
    let tensor = read_tensor(&args.tensor_file)
        .with_context(|| format!("reading {}", args.tensor_file.display()))?;
    let opts = CertifyOptions {
        rank_tol: cli.tol_rank,
        n_unitaries: args.n_unitaries,
        reorder: args.reorder,
        als: als_options(cli),
    };
    let mut rng = SeededRng::new(cli.seed);
    let cert = mlsvd_existence_check(&tensor, args.rank, &mut rng, opts)?;
    let json = serde_json::to_string_pretty(&cert)?;
    emit(cli.out.as_deref(), &(json + "\n"))?;
    Ok(exit_for(cert.verdict))
}

fn cmd_procrustes(cli: &Cli, args: &ProcrustesArgs) -> Result<ExitCode> {
    let w = read_tensor(&args.tensor_file)
        .with_context(|| format!("reading {}", args.tensor_file.display()))?;
    let what = read_tensor(&args.other_file)
        .with_context(|| format!("reading {}", args.other_file.display()))?;
    let r = args.rank;
    let pair = tensor_compress::procrustes_pair_compress(&w, &what, (r, r, r))?;
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "original_distance": pair.original_distance,
        "compressed_distance": pair.compressed_distance,
        "core_dims": [r, r, r],
    }))?;
    emit(cli.out.as_deref(), &(json + "\n"))?;
    Ok(ExitCode::from(0))
}

fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> Result<ExitCode> {
    let cfg = ExperimentConfig {
        experiment: ExperimentName::parse(&args.name)?,
        dim: args.dim,
        rank: args.rank,
        snr_grid: args.snr_grid.clone(),
        trials: args.trials,
        n_unitaries: args.n_unitaries,
        reorder: args.reorder,
        seed: cli.seed,
    };
    let table = run_experiment(&cfg)?;
    let rendered = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    emit(cli.out.as_deref(), &rendered)?;
    Ok(ExitCode::from(0))
}
