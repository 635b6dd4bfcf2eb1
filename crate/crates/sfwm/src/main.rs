use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(sfwm::main_with(sfwm::Cli::parse()))
}
