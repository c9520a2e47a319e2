use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    qclock_cli::run(qclock_cli::Cli::parse())
}
