//! `gowers`: reproducible experiments with Gowers-norm circuits over F_p^n.
//!
//! Exit codes: 0 ok / accept, 3 reject, 2 error (including a failed `--check`).

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, CliError, Command, Format};

const EXIT_REJECT: u8 = 3;
const EXIT_ERROR: u8 = 2;

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let mut report = commands::run(cli)?;
    let default = if matches!(cli.command, Command::Bench(_)) { Format::Csv } else { Format::Json };
    let format = cli.format.unwrap_or(default);
    report.config.format = Some(format);
    let text = output::render(&report, format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    let failed: Vec<_> = report.failed_checks().collect();
    if !failed.is_empty() {
        for c in failed {
            eprintln!("check failed: {} = {} (bound {})", c.name, c.value, c.bound);
        }
        return Ok(EXIT_ERROR);
    }
    Ok(match report.accept {
        Some(false) => EXIT_REJECT,
        _ => 0,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
