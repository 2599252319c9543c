//! The `gtmm` command line: `verify`, `build`, `bound` and `matmul`.
//!
//! Every run emits one JSON report (schema `gtmm/1`). Exit codes: 0 success,
//! 1 property violated, 2 usage or input error, 3 budget exceeded.

mod args;
mod commands;
mod io;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

pub use args::Cli;
pub use report::{Status, SCHEMA};

use io::InputLog;
use report::{round_floats, Report, Timing};

/// Runs one command, writing the report to `out` (or `--out`) and
/// diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };

    let start = Instant::now();
    let mut log = InputLog::default();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build();
    let mut diagnostics = Vec::new();
    let outcome = match pool {
        Ok(pool) => pool.install(|| commands::dispatch(&cli, &mut log, &mut diagnostics)),
        Err(e) => Err(anyhow::anyhow!("cannot start worker threads: {e}")),
    };
    for line in &diagnostics {
        let _ = writeln!(err, "{line}");
    }
    let (status, result, error) = match outcome {
        Ok((status, result)) => (status, result, None),
        Err(e) => {
            let status = match e.downcast_ref::<gtmm_core::Error>() {
                Some(core) if core.is_resource_limit() => Status::BudgetExceeded,
                _ => Status::Error,
            };
            let _ = writeln!(err, "error: {e:#}");
            (status, serde_json::Value::Null, Some(format!("{e:#}")))
        }
    };

    let report = Report {
        schema: SCHEMA,
        tool: format!("gtmm {}", env!("CARGO_PKG_VERSION")),
        command: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
        seed: cli.global.seed,
        budget: cli.global.budget,
        inputs: log.0,
        status,
        exit_code: status.exit_code(),
        result,
        error,
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    let json = round_floats(serde_json::to_value(&report).expect("report serializes"));
    let text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(err, "error: writing {}: {e}", path.display());
                return Status::Error.exit_code();
            }
            let _ = writeln!(out, "{}: exit {}, report in {}", json["status"].as_str().unwrap_or("?"), status.exit_code(), path.display());
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    status.exit_code()
}
