//! Command-line front end.
//!
//! Every run writes `<command>.csv` (a `# columns:` comment naming units,
//! then a header row) and `<command>.json`, a manifest holding the resolved
//! configuration, defaults filled in, tolerances and summary results.
//! Exit status: 0 success, 2 configuration error, 3 physics error,
//! 4 validation failure.

mod commands;
pub mod config;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use output::{Manifest, Table};

use crate::error::QbmError;

#[derive(Debug, Parser)]
#[command(name = "qbm", version, about = "Quantum Brownian motion of a damped harmonic oscillator")]
pub struct Cli {
    /// Configuration file (TOML, dotted keys such as `system.M = 1.0`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Override a configuration key, e.g. `--set damping.gamma=0.2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    pub gnuplot: bool,
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Susceptibility and equilibrium position spectrum, or resistor current noise.
    Spectrum,
    /// Symmetrized position correlation S_qq(t).
    Correlation,
    /// Equilibrium ⟨q²⟩, ⟨p²⟩ and the weak-coupling Δ_q.
    Moments,
    /// Reduced equilibrium density matrix in position representation.
    DensityMatrix,
    /// Partition function and ⟨q²⟩ from ∂ ln Z/∂ω₀.
    Partition,
    /// Density of states by Bromwich inversion (Drude friction).
    Dos,
    /// Bath noise correlation: oscillator sum, kernel integral, classical limit.
    Noise,
    /// Discretized bath oscillators.
    BathExport,
    /// Exact Gaussian relaxation of the oscillator plus N bath oscillators.
    Simulate,
    /// Lowest fluctuation eigenvalue versus temperature and the crossover temperature.
    Decay,
    /// Effective action of an imaginary-time path.
    Action,
    /// Cross-route oracle suite.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Correlation => "correlation",
            Self::Moments => "moments",
            Self::DensityMatrix => "density-matrix",
            Self::Partition => "partition",
            Self::Dos => "dos",
            Self::Noise => "noise",
            Self::BathExport => "bath-export",
            Self::Simulate => "simulate",
            Self::Decay => "decay",
            Self::Action => "action",
            Self::Validate => "validate",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Physics(QbmError),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Physics(_) => 3,
            Self::Validation(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Physics(e) => write!(f, "{e}"),
            Self::Validation(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<QbmError> for CliError {
    fn from(e: QbmError) -> Self {
        Self::Physics(e)
    }
}

/// What a command produced, before it is written out.
pub struct Outcome {
    pub table: Table,
    pub manifest: Manifest,
    /// Printed unless `--quiet`.
    pub summary: String,
    /// Set by `validate` when a check fails; files are still written.
    pub failed: Option<String>,
}

/// Runs one command and writes its artifacts.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = config::load(cli.config.as_deref(), &cli.overrides)?;
    let outcome = commands::dispatch(cli.command, &cfg)?;
    output::write_artifacts(&cli.out, cli.command.name(), &outcome, &cfg, cli.gnuplot)?;
    Ok(outcome)
}

/// Parses the process arguments, runs, and maps the result to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                println!("{}", outcome.summary);
                for w in &outcome.manifest.warnings {
                    eprintln!("warning: {w}");
                }
            }
            match outcome.failed {
                Some(msg) => {
                    eprintln!("validation failed: {msg}");
                    ExitCode::from(4)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
