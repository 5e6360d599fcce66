use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    nosig_cli::cli::run(nosig_cli::cli::Cli::parse())
}
