use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use linstab_core::numerology::{render_table, AuditRow};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the directory for relative report paths.
pub const REPORT_DIR_VAR: &str = "LINSTAB_REPORT_DIR";

/// Result class of a run; each maps to one exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Ok,
    CheckFailed,
    EvidenceOnly,
    Violation,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::CheckFailed => 1,
            Outcome::EvidenceOnly => 2,
            Outcome::Violation => 3,
        }
    }
}

pub const EXIT_REFUSED: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedRecord {
    pub purpose: &'static str,
    pub master: u64,
    pub indices: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: u32,
    pub command: String,
    pub scenario: String,
    pub outcome: Outcome,
    pub exit_code: i32,
    pub seeds: Vec<SeedRecord>,
    pub summary: Vec<String>,
    pub result: Value,
    pub certificates: Vec<Value>,
    pub audit_rows: Vec<AuditRow>,
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: String, scenario: String, outcome: Outcome) -> Self {
        Report {
            tool: "linstab",
            version: TOOL_VERSION,
            schema: SCHEMA_VERSION,
            command,
            scenario,
            outcome,
            exit_code: outcome.exit_code(),
            seeds: Vec::new(),
            summary: Vec::new(),
            result: Value::Null,
            certificates: Vec::new(),
            audit_rows: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn set_outcome(&mut self, outcome: Outcome) {
        self.outcome = outcome;
        self.exit_code = outcome.exit_code();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "linstab {}  {}", self.version, self.command);
        let outcome = serde_json::to_value(self.outcome).expect("unit enum");
        let _ = writeln!(out, "outcome: {} (exit {})", outcome.as_str().unwrap_or("?"), self.exit_code);
        for line in &self.summary {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "certificates: {}", self.certificates.len());
        if !self.audit_rows.is_empty() {
            let _ = writeln!(out, "audit rows: {}", self.audit_rows.len());
            out.push_str(&render_table(&self.audit_rows));
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "elapsed: {ms} ms");
        }
        let _ = writeln!(out, "scenario:");
        for line in self.scenario.lines() {
            let _ = writeln!(out, "  {line}");
        }
        out
    }
}

/// Resolves a relative report path against `LINSTAB_REPORT_DIR` when set.
pub fn resolve_path(path: &Path) -> PathBuf {
    match std::env::var_os(REPORT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn text_path(json: &Path) -> PathBuf {
    if json.extension().is_some_and(|e| e == "json") {
        json.with_extension("txt")
    } else {
        let mut s = json.as_os_str().to_owned();
        s.push(".txt");
        PathBuf::from(s)
    }
}

/// Writes the JSON document to `path` and the text rendering beside it.
pub fn emit_report(report: &Report, path: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
    let json = resolve_path(path);
    if let Some(parent) = json.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let text = text_path(&json);
    std::fs::write(&json, report.to_json())?;
    std::fs::write(&text, report.to_text())?;
    Ok((json, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_shape() {
        let r = Report::new("dsb".into(), "command = dsb\n".into(), Outcome::Ok);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["certificates"], Value::Array(vec![]));
        assert_eq!(v["version"], TOOL_VERSION);
        assert_eq!(v["exit_code"], 0);
        assert_eq!(r.to_json(), r.clone().to_json());
    }

    #[test]
    fn text_beside_json() {
        assert_eq!(text_path(Path::new("a/out.json")), PathBuf::from("a/out.txt"));
        assert_eq!(text_path(Path::new("out")), PathBuf::from("out.txt"));
    }
}
