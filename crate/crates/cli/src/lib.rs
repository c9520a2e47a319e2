//! `qclock` command-line driver.
//!
//! Every subcommand is a thin wrapper over `qclock-core`. Randomness comes
//! only from the seed in the input document; `--jobs` changes the worker
//! count but never the output bytes.

pub mod commands;
pub mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qclock",
    version,
    about = "Dicke-state multi-party clock synchronization toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Directory to write output files and the run manifest into.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tabular output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for simulation. Does not affect results.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the closed-form model against the statevector simulation.
    Verify {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Tabulate W-state vs optimal amplitudes over a range of n.
    Amplitude {
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
    },
    /// Print the optimal excitation count and its amplitude.
    Optimize {
        #[arg(long = "n", required = true, num_args = 1..)]
        n: Vec<usize>,
    },
    /// Run the protocol from a JSON config and estimate every skew.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run an accuracy sweep from a JSON spec.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Capacity(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Capacity(m) => write!(f, "capacity error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qclock_core::Error> for CliError {
    fn from(e: qclock_core::Error) -> Self {
        match e {
            qclock_core::Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub fn run(cli: Cli) -> ExitCode {
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qclock: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
