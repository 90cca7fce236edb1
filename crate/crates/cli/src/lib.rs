//! Configuration, dispatch and report output for the `pdseq` binary.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::Path;
use std::time::Instant;

pub use config::{parse_config, Command, RunConfig};
pub use error::CliError;
pub use report::{Report, SCHEMA};

/// Runs a parsed config and returns the report with the command's exit code.
pub fn run_config(cfg: &RunConfig) -> Result<(Report, i32), CliError> {
    let start = Instant::now();
    let (out, seed) = commands::dispatch(cfg)?;
    let report = Report {
        schema: SCHEMA.to_string(),
        command: cfg.command.name().to_string(),
        version: pdseq::VERSION.to_string(),
        config: cfg.clone(),
        seed,
        summary: out.summary,
        table: out.table,
        plot: out.plot,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, out.exit_code))
}

/// Reads, runs and emits one config file.
pub fn run_file(path: &Path) -> Result<(Report, i32), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let cfg = parse_config(&text)?;
    let (report, code) = run_config(&cfg)?;
    report.emit()?;
    Ok((report, code))
}
