//! `flywheel`: batch front end for rotor stress analysis, energy sizing,
//! press-fit assemblies, design optimization and the self-check suite.
//!
//! Exit codes: 0 success, 2 invalid input, 3 analysis failure,
//! 4 verification failure.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "flywheel", version, about = "Flywheel rotor stress analysis and design studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Stress profile and peak von Mises of one disk
    Analyze,
    /// Dimensionless stress factors over (t, r/b)
    Contour,
    /// Energy, specific energy and density at the stress-limited speed
    Energy,
    /// Rotor material economics and lift ratios
    Compare,
    /// Interface pressures and stresses of press-fitted bodies
    Assembly,
    /// Design optimization, parameter sweeps and preload studies
    Optimize,
    /// Closed forms against the numerical oracle; exits 4 on any failure
    Verify,
    /// Energy report plus stress state of one design
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MutateArg {
    RotationSign,
}

#[derive(clap::Args)]
pub struct Options {
    /// Input JSON file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file or directory (stdout if omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override an input field, e.g. --set load.angular_speed=500
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Random seed for optimize and verify
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Case count for a reduced verify run
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Inject a fault into verify to check that it is caught
    #[arg(long, global = true, value_enum)]
    mutate: Option<MutateArg>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome<T> = Result<T, Failure>;

impl Failure {
    pub fn config(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }

    pub fn analysis(error: anyhow::Error) -> Self {
        Self { code: 3, error }
    }

    pub fn verification(error: anyhow::Error) -> Self {
        Self { code: 4, error }
    }
}

impl From<flywheel_core::Error> for Failure {
    fn from(e: flywheel_core::Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Self { code, error: e.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
