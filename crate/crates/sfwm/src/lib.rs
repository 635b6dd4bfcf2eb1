//! File formats, experiments and the command line front end for
//! [`sfwm_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use clap::Parser;

pub use commands::{Command, Common};
pub use config::Config;
pub use error::{CliError, Result};

/// Simulate spontaneous four-wave mixing noise in photonic circuits.
#[derive(Debug, Parser)]
#[command(name = "sfwm", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Runs a parsed command line, writing outputs, and returns the exit status.
pub fn main_with(cli: Cli) -> u8 {
    match dispatch(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            error::exit::OK
        }
        Err((lines, e)) => {
            for l in lines {
                println!("{l}");
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

type Dispatch = std::result::Result<Vec<String>, (Vec<String>, CliError)>;

fn dispatch(cli: &Cli) -> Dispatch {
    let outcome = match &cli.command {
        Command::Replay(r) => manifest::RunManifest::read(&r.manifest)
            .and_then(|m| manifest::replay(&m, &cli.common.out)),
        c => manifest::run(c, &cli.common),
    }
    .map_err(|e| (Vec::new(), e))?;
    let mut lines = outcome.report.clone();
    let paths = outcome
        .artifacts
        .write_all(&cli.common.out)
        .map_err(|e| (lines.clone(), e))?;
    lines.extend(paths.iter().map(|p| format!("wrote {}", p.display())));
    match outcome.failure {
        Some(f) => Err((lines, CliError::Validation(f))),
        None => Ok(lines),
    }
}
