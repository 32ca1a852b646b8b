mod commands;
mod config;
mod output;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Failure;
use crate::config::{Cli, RunConfig};

fn run() -> Result<Option<Failure>, Failure> {
    let cli = Cli::parse();
    let cfg = RunConfig::resolve(cli).map_err(|e| Failure::Config(e.0))?;
    let outcome = commands::run(&cfg)?;
    let text = outcome.table.render(&cfg);
    match &cfg.out {
        Some(path) => output::write_atomic(path, &text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(outcome.failure)
}

fn main() -> ExitCode {
    match run() {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(f)) | Err(f) => {
            eprintln!("gplab: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
