//! Rendering of reports as JSON lines, CSV or indented text.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::commands::Report;
use crate::config::{usage, CliError, Format};

/// Adds the version, the config echo and (first line only) the checks.
fn stamped(report: &Report) -> Result<Vec<Map<String, Value>>, CliError> {
    let config = serde_json::to_value(&report.config)?;
    let mut out = Vec::with_capacity(report.lines.len());
    for (i, line) in report.lines.iter().enumerate() {
        let mut line = line.clone();
        line.insert("version".into(), Value::from(gowers_core::VERSION));
        line.insert("config".into(), config.clone());
        if i == 0 && !report.checks.is_empty() {
            line.insert("checks".into(), serde_json::to_value(&report.checks)?);
        }
        out.push(line);
    }
    Ok(out)
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_lines(report),
        Format::Csv => csv(report),
        Format::Pretty => pretty(report),
    }
}

fn json_lines(report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    for line in stamped(report)? {
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn csv(report: &Report) -> Result<String, CliError> {
    if report.columns.is_empty() {
        return Err(usage(format!(
            "csv output is only produced by bench; use --format json for {}",
            report.config.subcommand
        )));
    }
    let mut out = String::new();
    writeln!(out, "# gowers {}", gowers_core::VERSION).unwrap();
    writeln!(out, "# config {}", serde_json::to_string(&report.config)?).unwrap();
    for c in report.failed_checks() {
        writeln!(out, "# check failed: {} = {} (bound {})", c.name, c.value, c.bound).unwrap();
    }
    out.push_str(&report.columns.join(","));
    out.push('\n');
    for line in &report.lines {
        let cells: Vec<String> = report
            .columns
            .iter()
            .map(|c| csv_cell(line.get(*c).unwrap_or(&Value::Null)))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

fn pretty_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn pretty(report: &Report) -> Result<String, CliError> {
    let mut out = String::new();
    writeln!(out, "gowers {} {}", gowers_core::VERSION, report.config.subcommand).unwrap();
    writeln!(out, "config: {}", serde_json::to_string(&report.config)?).unwrap();
    for line in &report.lines {
        out.push('\n');
        for (key, value) in line {
            match value {
                Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                    writeln!(out, "{key}:").unwrap();
                    for item in items {
                        let fields = item.as_object().expect("checked above");
                        let cells: Vec<String> = fields
                            .iter()
                            .filter(|(k, _)| k.as_str() != "expected")
                            .map(|(k, v)| format!("{k}={}", pretty_value(v)))
                            .collect();
                        let marker = if fields.get("expected") == Some(&Value::Bool(true)) { "  <- expected" } else { "" };
                        writeln!(out, "  {}{marker}", cells.join("  ")).unwrap();
                    }
                }
                Value::Object(fields) => {
                    writeln!(out, "{key}:").unwrap();
                    for (k, v) in fields {
                        writeln!(out, "  {k}: {}", pretty_value(v)).unwrap();
                    }
                }
                _ => writeln!(out, "{key}: {}", pretty_value(value)).unwrap(),
            }
        }
    }
    if !report.checks.is_empty() {
        writeln!(out, "\nchecks:").unwrap();
        for c in &report.checks {
            let status = if c.passed { "ok" } else { "FAILED" };
            writeln!(out, "  {status:<6} {} = {} (bound {})", c.name, c.value, c.bound).unwrap();
        }
    }
    Ok(out)
}
