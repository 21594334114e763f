mod cli;
mod commands;
mod failure;

use std::process::ExitCode;

use clap::Parser;
use negclass_core::PipelineConfig;

use crate::cli::Cli;
use crate::failure::Failure;

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(failure::USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &args.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| Failure::from(e).context("loading settings")),
        None => Ok(PipelineConfig::default()),
    }
    .and_then(|cfg| commands::run(args.command, cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
