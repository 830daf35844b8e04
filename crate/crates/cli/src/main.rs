mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use commands::{run, EXIT_USAGE};
use config::RunConfig;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    if let Err(msg) = cfg.validate() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    if cfg.dry_run {
        println!("{}", cfg.canonical_string());
        return ExitCode::SUCCESS;
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match pool.install(|| run(&cfg)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let written = match &cfg.out {
        Some(path) => fs::write(path, &outcome.output),
        None => std::io::stdout().write_all(outcome.output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    ExitCode::from(outcome.status)
}
