//! CSV and JSON report writers.

use std::fs;
use std::path::Path;

use helios_core::resample::ErrorStats;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub const AUDIT_HEADER: &str =
    "variable,lead_day,bias,mae,mae_ci_lower,mae_ci_upper,bias_ci_lower,bias_ci_upper,n,dropped";

/// Rounds to 6 decimals and prints the shortest form that reads back to the
/// rounded value.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

pub fn audit_row(stats: &ErrorStats, dropped: usize) -> String {
    [
        stats.variable.code().to_string(),
        stats.lead_day.to_string(),
        num(stats.bias),
        num(stats.mae),
        num(stats.mae_ci.lower),
        num(stats.mae_ci.upper),
        num(stats.bias_ci.lower),
        num(stats.bias_ci.upper),
        stats.n.to_string(),
        dropped.to_string(),
    ]
    .join(",")
}

/// Builds a CSV document from a header and preformatted rows.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut text = String::with_capacity(4096);
        text.push_str(header);
        text.push('\n');
        Csv { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn line(&mut self, line: &str) {
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, &self.text)
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// A JSON report: `schema_version`, `command`, then the body's fields.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<T: Serialize>(path: &Path, command: &str, body: &T) -> std::io::Result<()> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, body };
    let mut text = serde_json::to_string_pretty(&env).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}
