//! Command-line surface for `bmin_core`.
//!
//! Every subcommand reads JSON documents, runs one library operation and
//! renders JSON (or CSV for `moment`). Output is a pure function of the flags.
//! Exit codes: `0` minimal / success, `1` not minimal, `2` undecided or error.

pub mod algebra;
pub mod docs;

use std::path::{Path, PathBuf};
use std::time::Instant;

use bmin_core::minimality::{check_minimal, construct_minimal, MinimalityConfig, Verdict};
use bmin_core::moment::{compress_family, jnr_support, sample_extreme, support_function, FWConfig};
use bmin_core::variational::{best_approximation, directional_derivative, AffineFamily, SolverConfig, StepRule};
use bmin_core::{HermitianMatrix, SubalgebraBasis, Subspace};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub use algebra::AlgebraSpec;
use docs::{
    BestApproxDocument, CertificateDocument, DirDerivDocument, FrameDocument, MatrixDocument, ReportDocument,
    SupportDocument, Timings,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bmin_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid document: {0}")]
    Document(String),
    #[error("{0}")]
    Usage(String),
}

/// Rendered command output and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

pub fn exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Minimal => 0,
        Verdict::NotMinimal => 1,
        Verdict::Undecided => 2,
    }
}

#[derive(Debug, Parser)]
#[command(name = "bmin", version, about = "Spectral-norm minimality relative to a C*-subalgebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a matrix is minimal; JSON report, exit 0/1/2.
    Check(CheckArgs),
    /// Sample extreme points of the moment of a subspace as CSV.
    Moment(MomentArgs),
    /// Like `check`, but prints the certificate.
    Certificate(CheckArgs),
    /// Build lambda (P_V - P_W) + R from a support pair.
    Construct(ConstructArgs),
    /// Minimize ||A_0 + sum x_k B_k|| over x.
    BestApprox(BestApproxArgs),
    /// Directional derivative of lambda_max(A(x)) along w.
    Dirderiv(DirDerivArgs),
    /// Support function of the moment of a subspace at w.
    Support(SupportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Distance below which two moments count as intersecting.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_iter: usize,
}

impl Tolerances {
    pub fn fw(&self) -> FWConfig {
        FWConfig {
            gap_tol: self.gap_tol,
            dist_tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// diag | pauli:Q | block:SPEC | custom:FILE
    #[arg(long)]
    pub algebra: AlgebraSpec,
    #[command(flatten)]
    pub tolerances: Tolerances,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    /// Frame document whose columns span the subspace.
    #[arg(long)]
    pub frame: PathBuf,
    #[arg(long)]
    pub algebra: AlgebraSpec,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub plus: PathBuf,
    #[arg(long)]
    pub minus: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    /// Remainder mu (I - P_V - P_W).
    #[arg(long, conflicts_with = "remainder")]
    pub mu: Option<f64>,
    /// Remainder as a matrix document.
    #[arg(long)]
    pub remainder: Option<PathBuf>,
    #[arg(long)]
    pub algebra: AlgebraSpec,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepRuleArg {
    Level,
    Diminishing,
}

#[derive(Debug, Clone, Args)]
pub struct BestApproxArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub algebra: AlgebraSpec,
    /// Starting point; defaults to 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x0: Option<Vec<f64>>,
    /// Optimality gap tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = StepRuleArg::Diminishing)]
    pub step_rule: StepRuleArg,
    /// Step scale; defaults to ||A(x0)||.
    #[arg(long)]
    pub step_scale: Option<f64>,
    /// Include the (iteration, norm) trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DirDerivArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub algebra: AlgebraSpec,
    /// Base point; defaults to 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SupportArgs {
    #[arg(long)]
    pub frame: PathBuf,
    #[arg(long)]
    pub algebra: AlgebraSpec,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub w: Vec<f64>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("documents serialize");
    s.push('\n');
    s
}

fn load_matrix(path: &Path) -> Result<HermitianMatrix, CliError> {
    read_json::<MatrixDocument>(path)?.to_hermitian()
}

fn load_frame(path: &Path) -> Result<Subspace, CliError> {
    read_json::<FrameDocument>(path)?.to_subspace()
}

pub fn cmd_check(
    a: &HermitianMatrix,
    basis: &SubalgebraBasis,
    cfg: &MinimalityConfig,
    timings: bool,
) -> Result<(ReportDocument, i32), CliError> {
    let start = Instant::now();
    let report = check_minimal(a, basis, cfg)?;
    let mut doc = ReportDocument::from(&report);
    if timings {
        doc.timings = Some(Timings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok((doc, exit_code(report.verdict)))
}

/// CSV with header `B_1..B_t` and one sampled extreme point of `m_S` per row.
pub fn cmd_moment(frame: &Subspace, basis: &SubalgebraBasis, samples: usize, seed: u64) -> Result<String, CliError> {
    let fam = compress_family(frame, basis)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record((1..=basis.dim()).map(|k| format!("B_{k}")))?;
    for p in sample_extreme(&fam, samples, seed) {
        w.write_record(p.coords.iter().map(|c| c.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `lambda (P_V - P_W) + R`, with `R = mu (I - P_V - P_W)` when `mu` is given.
pub fn cmd_construct(
    v: &Subspace,
    w: &Subspace,
    lambda: f64,
    remainder: Remainder,
    basis: &SubalgebraBasis,
    fw: &FWConfig,
) -> Result<MatrixDocument, CliError> {
    let n = v.ambient_dim();
    let r = match remainder {
        Remainder::None => HermitianMatrix::zeros(n),
        Remainder::Scalar(mu) => HermitianMatrix::identity(n)
            .sub(&v.projector())
            .sub(&w.projector())
            .scale(mu),
        Remainder::Matrix(m) => m,
    };
    let m = construct_minimal(v, w, lambda, &r, basis, fw)?;
    Ok(MatrixDocument::from(&m))
}

pub enum Remainder {
    None,
    Scalar(f64),
    Matrix(HermitianMatrix),
}

pub fn cmd_best_approx(
    a0: &HermitianMatrix,
    basis: &SubalgebraBasis,
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
    with_trace: bool,
) -> Result<BestApproxDocument, CliError> {
    let fam = AffineFamily::new(a0.clone(), basis.clone())?;
    let zero = vec![0.0; fam.dim()];
    let r = best_approximation(&fam, x0.unwrap_or(&zero), cfg)?;
    Ok(BestApproxDocument::new(&r, with_trace))
}

pub fn cmd_dirderiv(
    a0: &HermitianMatrix,
    basis: &SubalgebraBasis,
    x: Option<&[f64]>,
    w: &[f64],
) -> Result<DirDerivDocument, CliError> {
    let fam = AffineFamily::new(a0.clone(), basis.clone())?;
    let zero = vec![0.0; fam.dim()];
    Ok(DirDerivDocument {
        value: directional_derivative(&fam, x.unwrap_or(&zero), w)?,
    })
}

pub fn cmd_support(frame: &Subspace, basis: &SubalgebraBasis, w: &[f64]) -> Result<SupportDocument, CliError> {
    let fam = compress_family(frame, basis)?;
    if w.len() != basis.dim() {
        return Err(CliError::Usage(format!("w has {} entries, algebra has dimension {}", w.len(), basis.dim())));
    }
    Ok(SupportDocument {
        support: support_function(&fam, w)?,
        jnr_support: jnr_support(&fam, w)?,
    })
}

fn minimality_config(t: &Tolerances) -> MinimalityConfig {
    MinimalityConfig {
        fw: t.fw(),
        ..MinimalityConfig::default()
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ok = |stdout: String| Outcome { stdout, code: 0 };
    match &cli.command {
        Command::Check(args) => {
            let a = load_matrix(&args.matrix)?;
            let basis = args.algebra.resolve(a.dim())?;
            let (doc, code) = cmd_check(&a, &basis, &minimality_config(&args.tolerances), args.timings)?;
            Ok(Outcome {
                stdout: render(&doc),
                code,
            })
        }
        Command::Certificate(args) => {
            let a = load_matrix(&args.matrix)?;
            let basis = args.algebra.resolve(a.dim())?;
            let (doc, code) = cmd_check(&a, &basis, &minimality_config(&args.tolerances), args.timings)?;
            let stdout = match &doc.certificate {
                Some(cert) => render::<CertificateDocument>(cert),
                None => render(&doc),
            };
            Ok(Outcome { stdout, code })
        }
        Command::Moment(args) => {
            let frame = load_frame(&args.frame)?;
            let basis = args.algebra.resolve(frame.ambient_dim())?;
            Ok(ok(cmd_moment(&frame, &basis, args.samples, args.seed)?))
        }
        Command::Construct(args) => {
            let v = load_frame(&args.plus)?;
            let w = load_frame(&args.minus)?;
            let basis = args.algebra.resolve(v.ambient_dim())?;
            let remainder = match (args.mu, &args.remainder) {
                (Some(mu), _) => Remainder::Scalar(mu),
                (None, Some(path)) => Remainder::Matrix(load_matrix(path)?),
                (None, None) => Remainder::None,
            };
            let doc = cmd_construct(&v, &w, args.lambda, remainder, &basis, &args.tolerances.fw())?;
            Ok(ok(render(&doc)))
        }
        Command::BestApprox(args) => {
            let a0 = load_matrix(&args.matrix)?;
            let basis = args.algebra.resolve(a0.dim())?;
            let cfg = SolverConfig {
                max_iter: args.max_iter,
                step_rule: match args.step_rule {
                    StepRuleArg::Level => StepRule::Level,
                    StepRuleArg::Diminishing => StepRule::Diminishing,
                },
                c: args.step_scale,
                dist_tol: args.tol,
                ..SolverConfig::default()
            };
            let doc = cmd_best_approx(&a0, &basis, args.x0.as_deref(), &cfg, args.trace)?;
            Ok(ok(render(&doc)))
        }
        Command::Dirderiv(args) => {
            let a0 = load_matrix(&args.matrix)?;
            let basis = args.algebra.resolve(a0.dim())?;
            Ok(ok(render(&cmd_dirderiv(&a0, &basis, args.x.as_deref(), &args.w)?)))
        }
        Command::Support(args) => {
            let frame = load_frame(&args.frame)?;
            let basis = args.algebra.resolve(frame.ambient_dim())?;
            Ok(ok(render(&cmd_support(&frame, &basis, &args.w)?)))
        }
    }
}
