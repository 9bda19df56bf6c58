use std::process::ExitCode;

use clap::Parser;
use langford_mrf_cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
