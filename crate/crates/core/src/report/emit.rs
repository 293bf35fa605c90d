//! Report serialization.

use std::fmt::Write;
use std::str::FromStr;

use serde_json::Value;

use super::run::Report;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Pretty JSON with sorted keys, without a trailing newline.
pub fn report_json(report: &Report) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.3e}"),
            _ => n.to_string(),
        }),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} ({}) seed {}: {}",
        report.scenario,
        report.kind.as_str(),
        report.seed,
        report.status.as_str()
    );
    for check in &report.checks {
        let values: Vec<String> = check
            .measured
            .iter()
            .filter_map(|(k, v)| scalar(v).map(|s| format!("{k}={s}")))
            .collect();
        let _ = write!(
            out,
            "  {:<7} {:<28} [{}]",
            check.status.as_str(),
            check.id,
            check.anchor
        );
        if !values.is_empty() {
            let _ = write!(out, " {}", values.join(" "));
        }
        if let Some(detail) = &check.detail {
            let _ = write!(out, " ({detail})");
        }
        out.push('\n');
    }
    out
}

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report_json(report)).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => text(report),
    }
}

/// Several reports: a JSON array, or text blocks one after another.
pub fn emit_reports(reports: &[Report], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let values: Vec<Value> = reports.iter().map(report_json).collect();
            let mut s = serde_json::to_string_pretty(&values).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => reports.iter().map(text).collect(),
    }
}
