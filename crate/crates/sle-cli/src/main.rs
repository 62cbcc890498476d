//! `sle`: batch runner for the samplers, partition functions and checks.
//!
//! Exit codes: 0 success, 1 a gated check failed, 2 bad configuration,
//! 3 numerical or I/O failure.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigError, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "sle",
    version,
    about = "Radial and multiradial SLE sampler and verification runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample driving records to CSV (one file per path, with a JSON sidecar).
    Sample(SampleArgs),
    /// Rebuild curves from a driving record.
    Trace(TraceArgs),
    /// Partition-function evaluation.
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Run one verification check.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Run the full acceptance suite.
    Suite(SuiteArgs),
}

/// Parameters shared by all commands; flags override `--config`.
#[derive(Args, Clone, Default)]
struct Params {
    /// JSON config file; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    rho: Option<Vec<f64>>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// Boundary target angle (watermelon) or real target point (fusion).
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Time horizon.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    total_capacity: Option<f64>,
    #[arg(long)]
    bursts: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    starts: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ends: Option<Vec<f64>>,
}

impl Params {
    fn merged(&self) -> Result<ExperimentConfig, ConfigError> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            kappa: self.kappa,
            mu: self.mu,
            rho: self.rho.clone(),
            p: self.p,
            angles: self.angles.clone(),
            target: self.target,
            dt: self.dt,
            steps: self.steps,
            t: self.t,
            n_paths: self.paths,
            seed: self.seed,
            out: self.out.clone(),
            tolerance: self.tolerance,
            stride: self.stride,
            horizon: self.horizon,
            alpha: self.alpha,
            x0: self.x0,
            epsilons: self.epsilons.clone(),
            total_capacity: self.total_capacity,
            bursts: self.bursts,
            starts: self.starts.clone(),
            ends: self.ends.clone(),
        };
        Ok(base.overlay(&flags))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Radial,
    Rho,
    Multiradial,
    Watermelon,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    params: Params,
    /// Defaults to radial for one angle without weights, rho with weights,
    /// and multiradial otherwise.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

#[derive(Args)]
struct TraceArgs {
    /// Driving record CSV written by `sle sample`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PartitionCommand {
    /// Evaluate a partition function; prints {log_abs, phase, grad}.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
#[allow(clippy::enum_variant_names)]
enum FnArg {
    ZMultiradial,
    ZRadialRho,
    ZFusion,
    ZFusionHalfplane,
    ZShuffle,
    Rainbow,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    function: FnArg,
    #[command(flatten)]
    params: Params,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Spiral martingale of a single radial SLE.
    Martingale(Params),
    /// One-curve slice of the multiradial martingale.
    Slice(Params),
    /// Multi-time martingale on a staircase schedule.
    TwoTime(Params),
    /// First-curve marginal against SLE_κ^μ(2, …, 2).
    Resampling(Params),
    /// Capacity window of first-passage times.
    Transience(Params),
    /// Bessel hitting exponent.
    Bessel(Params),
    /// Rainbow fusion limit.
    Fusion(Params),
    /// Exponential decay of the force-point spread.
    GapDecay(Params),
    /// Monotone coupling with the Bessel process.
    Coupling(Params),
    /// Own-capacity bounds in common time.
    CommonTime(Params),
    /// Full acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Desk,
    Smoke,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, value_enum, default_value = "desk")]
    preset: PresetArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sle(#[from] sle_core::SleError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SLE_THREADS") {
        let n: usize = v.parse().map_err(|_| ConfigError::Invalid {
            field: "SLE_THREADS",
            msg: format!("{v:?} is not a thread count"),
        })?;
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    Ok(())
}

/// Returns whether all gated checks passed.
fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Sample(a) => commands::sample(a.params.merged()?, a.scheme.map(commands::scheme_of)),
        Command::Trace(a) => commands::trace(&a.input, a.stride, a.out.as_deref()),
        Command::Partition(PartitionCommand::Eval(a)) => {
            commands::eval(commands::function_of(a.function), a.params.merged()?)
        }
        Command::Verify(VerifyCommand::Suite(s)) | Command::Suite(s) => {
            commands::suite(commands::preset_of(s.preset), s.seed, s.out.as_deref())
        }
        Command::Verify(v) => {
            let (kind, params) = match v {
                VerifyCommand::Martingale(p) => (commands::Check::Martingale, p),
                VerifyCommand::Slice(p) => (commands::Check::Slice, p),
                VerifyCommand::TwoTime(p) => (commands::Check::TwoTime, p),
                VerifyCommand::Resampling(p) => (commands::Check::Resampling, p),
                VerifyCommand::Transience(p) => (commands::Check::Transience, p),
                VerifyCommand::Bessel(p) => (commands::Check::Bessel, p),
                VerifyCommand::Fusion(p) => (commands::Check::Fusion, p),
                VerifyCommand::GapDecay(p) => (commands::Check::GapDecay, p),
                VerifyCommand::Coupling(p) => (commands::Check::Coupling, p),
                VerifyCommand::CommonTime(p) => (commands::Check::CommonTime, p),
                VerifyCommand::Suite(_) => unreachable!("handled above"),
            };
            commands::verify(kind, params.merged()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("sle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
