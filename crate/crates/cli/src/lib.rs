//! Command-line surface over `mnv-core`: build initial data, run the flow,
//! analyze and verify results, and export meshes and tables.

mod analyze;
mod evolve;
mod export;
mod make;
mod verify;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mnv_core::flows::{Gauge, Scheme};

pub use analyze::analyze;
pub use evolve::evolve;
pub use export::export;
pub use make::make;
pub use verify::verify;

#[derive(Debug, Parser)]
#[command(
    name = "mnv",
    version,
    about = "Tori in Weierstrass form under the modified Novikov–Veselov flow"
)]
pub struct Cli {
    /// Worker threads for the spectral kernels (default: all cores).
    #[arg(long, global = true, env = "MNV_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build initial Weierstrass data and write a snapshot, mesh and report.
    Make(MakeArgs),
    /// Run the flow from a snapshot, writing snapshots and an invariant series.
    Evolve(EvolveArgs),
    /// Report Willmore energy, Euler–Lagrange residual and conformal class.
    Analyze(AnalyzeArgs),
    /// Run a built-in property suite; exits nonzero naming any failed check.
    Verify(VerifyArgs),
    /// Convert a snapshot or series into a mesh or table.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceKind {
    /// The Clifford torus on the 2π×2π square.
    Clifford,
    /// A torus of revolution with core radius `--aspect` and tube radius 1.
    Round,
    /// An x-only potential read from a text profile (one value per line).
    Revolution,
    /// A potential read from a GWF1 record; spinors from the Dirac kernel.
    Potential,
    /// An immersion read from three GWF1 records (X¹, X², X³).
    Immersion,
}

#[derive(Debug, Args)]
pub struct MakeArgs {
    pub source: SourceKind,
    /// Input file for `revolution`, `potential` and `immersion`.
    pub input: Option<PathBuf>,
    /// Grid points per side (for `revolution`, around the axis).
    #[arg(long, short = 'n', default_value_t = 64)]
    pub resolution: usize,
    /// Period of the revolution profile.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub period: f64,
    /// Core radius of the `round` torus.
    #[arg(long, default_value_t = 2.0)]
    pub aspect: f64,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    /// Integrating factor with four-stage Runge–Kutta.
    If,
    /// Plain four-stage Runge–Kutta.
    Plain,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::If => Scheme::IntegratingFactor,
            SchemeArg::Plain => Scheme::Rk4,
        }
    }
}

/// `zero-mean`, `mean-square`, or a number fixing the mean of V.
pub fn parse_gauge(s: &str) -> std::result::Result<Gauge, String> {
    match s {
        "zero-mean" => Ok(Gauge::ZeroMean),
        "mean-square" => Ok(Gauge::MeanSquare),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Gauge::Fixed)
            .ok_or_else(|| format!("expected zero-mean, mean-square or a number, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Snapshot to start from, or `clifford` for the built-in torus.
    pub input: String,
    /// Resolution used when the input is `clifford`.
    #[arg(long, short = 'n', default_value_t = 64)]
    pub resolution: usize,
    /// Time step (default: 0.5·Δx³).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Snapshot and invariant-row cadence, in steps.
    #[arg(long, default_value_t = 100)]
    pub every: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::If)]
    pub scheme: SchemeArg,
    #[arg(long, value_parser = parse_gauge, default_value = "zero-mean")]
    pub gauge: Gauge,
    /// Form products nodally (aliased); only useful as a negative control.
    #[arg(long)]
    pub no_dealias: bool,
    /// TOML file overriding the default tolerances.
    #[arg(long)]
    pub tolerances: Option<PathBuf>,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Snapshot files, or one run directory written by `evolve`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Where to write the per-snapshot CSV (default: print only).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Spectral,
    Triples,
    Reductions,
    Clifford,
    Representation,
    Exactness,
    Conservation,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = mnv_core::verify::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Wavefront mesh of the synthesized immersion.
    Obj,
    /// Per-node CSV of one of D, H, K, U.
    Scalars,
    /// Whitespace-separated invariant series from an `evolve` CSV.
    Series,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Snapshot (for `obj`, `scalars`) or invariant CSV (for `series`).
    pub input: PathBuf,
    #[arg(long, short = 'f')]
    pub format: String,
    /// Quantity for `scalars`: D, H, K or U.
    #[arg(long, short = 'q', default_value = "H")]
    pub quantity: String,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

/// Whether every check of a command held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    Failed,
}

pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        anyhow::ensure!(n > 0, "thread count must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<Status> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Make(a) => make(&a),
        Command::Evolve(a) => evolve(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Verify(a) => verify(&a),
        Command::Export(a) => export(&a),
    }
}
