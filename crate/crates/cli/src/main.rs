//! Batch runner for the spectral approximation experiments.
//!
//! Exit status: 0 when every pass/fail flag in the report holds, 1 when a
//! tolerance check fails, 2 on configuration or I/O errors. The report goes
//! to stdout (or --out); timing goes to stderr so saved output stays
//! byte-reproducible.

// Validation uses negated comparisons (!(v > 0.0)) so NaN flags are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod experiments;
mod report;

use clap::Parser;
use experiments::Format;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    let start = Instant::now();
    let run = match experiments::run(&cli.command) {
        Ok(run) => run,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let rendered = match run.format {
        Format::Json => run.report.to_json(),
        Format::Csv => run.report.to_csv(),
    };
    if let Some(path) = &run.out {
        if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else if let Err(e) = std::io::stdout().write_all(rendered.as_bytes()) {
        eprintln!("error: writing stdout: {e}");
        return ExitCode::from(2);
    }
    eprintln!("{} finished in {:.3}s", cli.command.name(), start.elapsed().as_secs_f64());
    ExitCode::from(if run.report.passed() { 0 } else { 1 })
}
