//! Spec files, mesh export, JSON reports and the `bjorling` command line.

pub mod args;
pub mod commands;
pub mod input;
pub mod mesh;
pub mod parallel;
pub mod report;
pub mod specfile;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command};
use commands::{Outcome, SearchArgs};
use input::{CliError, CliResult};

fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
        Command::Cpg { input, samples } => commands::cpg(input, *samples),
        Command::Adjoint(a) => commands::adjoint(a),
        Command::Symmetry { input, max_order } => commands::symmetry(input, *max_order),
        Command::Relate {
            inputs,
            allow_scale,
            common,
        } => commands::relate(inputs, *allow_scale, common),
        Command::Search {
            spec,
            budget,
            start,
            restarts,
            common,
        } => commands::search(SearchArgs {
            spec: spec.as_deref(),
            budget: *budget,
            start: start.clone(),
            restarts: *restarts,
            common,
        }),
        Command::Catalog { name, params, common } => commands::catalog(name.as_deref(), params, common),
    }
}

fn run_in_pool(command: &Command) -> CliResult<Outcome> {
    match command.common().threads {
        None => dispatch(command),
        Some(0) => Err(CliError::Input("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Input(format!("cannot start {n} threads: {e}")))?
            .install(|| dispatch(command)),
    }
}

fn emit(outcome: &Outcome, stdout: &mut dyn Write) -> CliResult<()> {
    if let Some(text) = &outcome.stdout {
        stdout.write_all(text.as_bytes())?;
    }
    if let Some(report) = &outcome.report {
        let json = report.to_json();
        match &outcome.report_out {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(path, json)
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?
            }
            None if outcome.stdout.is_none() => stdout.write_all(json.as_bytes())?,
            None => {}
        }
    }
    Ok(())
}

/// Runs one command and returns its exit code: 0 success, 1 a requested check
/// failed, 2 bad input or I/O, 3 numerical failure.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = run_in_pool(&cli.command).and_then(|o| emit(&o, stdout).map(|_| o));
    match result {
        Ok(outcome) => {
            if let Some(r) = &outcome.report {
                for c in r.checks.iter().filter(|c| !c.pass) {
                    let _ = writeln!(stderr, "check failed: {} (residual {:e}, tolerance {:e})", c.name, c.residual, c.tolerance);
                }
            }
            outcome.exit_code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
