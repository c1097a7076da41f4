//! `dwq`: verification driver for polymomentum field theory.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use report::Report;

/// Seed for randomized suites when neither the config nor `--seed` sets one.
const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser)]
#[command(name = "dwq", version, about = "Checks De Donder-Weyl brackets, equations and quantum solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML); built-in defaults when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for report.json and CSV tables.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Overrides the seed of randomized suites.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical bracket table and graded antisymmetry suite.
    Brackets(Target),
    /// Field-equation, motion and Hamilton-Jacobi residuals of a tabulated solution.
    DwCheck(Target),
    /// Spectrum, mode residuals and conservation-law convergence.
    Quantum(Target),
    /// Quasiclassical decomposition of a standing mode and the ħκ sweep.
    Wkb(Target),
    /// Composed against functional vacuum Gaussian coefficients.
    Vacuum(Target),
}

#[derive(Args)]
struct Target {
    /// Run configuration; same as `--config`.
    #[arg(value_name = "CONFIG")]
    path: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Brackets(_) => "brackets",
            Self::DwCheck(_) => "dw-check",
            Self::Quantum(_) => "quantum",
            Self::Wkb(_) => "wkb",
            Self::Vacuum(_) => "vacuum",
        }
    }

    fn target(&self) -> &Target {
        match self {
            Self::Brackets(t) | Self::DwCheck(t) | Self::Quantum(t) | Self::Wkb(t) | Self::Vacuum(t) => t,
        }
    }
}

/// Why a run stopped before producing a verdict.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Data(_) => 3,
            Self::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Data(m) => write!(f, "data error: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<dwq_core::Error> for Failure {
    fn from(e: dwq_core::Error) -> Self {
        use dwq_core::Error as E;
        match e {
            E::InvalidSolutionData(_) | E::Parse(_) => Self::Data(e.to_string()),
            E::ConvergenceFailure(_)
            | E::TachyonicMode { .. }
            | E::DecompositionFailure(_)
            | E::SingularHJNorm => Self::Numerical(e.to_string()),
            _ => Self::Config(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let path = match (&cli.config, &cli.command.target().path) {
        (Some(_), Some(_)) => {
            return Err(Failure::Config("give the config either as --config or positionally".into()))
        }
        (Some(p), None) | (None, Some(p)) => Some(p),
        (None, None) => None,
    };
    match path {
        Some(p) => RunConfig::load(p).map_err(Failure::Config),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let cfg = load_config(cli)?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let mut report = match &cli.command {
        Command::Brackets(_) => commands::brackets::run(&cfg, seed)?,
        Command::DwCheck(_) => commands::dw_check::run(&cfg, seed)?,
        Command::Quantum(_) => commands::quantum::run(&cfg, seed)?,
        Command::Wkb(_) => commands::wkb::run(&cfg, seed)?,
        Command::Vacuum(_) => commands::vacuum::run(&cfg, seed)?,
    };
    debug_assert_eq!(report.command, cli.command.name());
    report.finish();
    if let Some(dir) = &cli.out {
        report
            .write_to(dir)
            .map_err(|e| Failure::Config(format!("cannot write to {}: {e}", dir.display())))?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_human());
            }
            ExitCode::from(if report.status == "pass" { 0 } else { 1 })
        }
        Err(failure) => {
            eprintln!("dwq {}: {failure}", cli.command.name());
            ExitCode::from(failure.exit_code())
        }
    }
}
