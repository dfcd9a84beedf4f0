//! Check records and their deterministic rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Gates the exit code.
    Hard,
    /// Annotates only.
    Monitor,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

/// A CSV file produced alongside the summary.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Hard && !c.passed)
            .count()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn status(c: &Check) -> &'static str {
    match (c.passed, c.kind) {
        (true, _) => "pass",
        (false, CheckKind::Hard) => "FAIL",
        (false, CheckKind::Monitor) => "flag",
    }
}

pub fn render_summary(reports: &[SuiteReport], format: Format) -> String {
    let checks: Vec<&Check> = reports.iter().flat_map(|r| &r.checks).collect();
    match format {
        Format::Csv => {
            let mut out = String::from("suite,check,kind,status,detail\n");
            for c in checks {
                let kind = match c.kind {
                    CheckKind::Hard => "hard",
                    CheckKind::Monitor => "monitor",
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.suite,
                    c.name,
                    kind,
                    status(c),
                    csv_field(&c.detail)
                );
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&checks).expect("checks serialize");
            s.push('\n');
            s
        }
    }
}

/// Writes the summary and every artifact under `dir`.
pub fn write_reports(dir: &Path, reports: &[SuiteReport], format: Format) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Resource(format!("cannot create {}: {e}", dir.display())))?;
    let summary = dir.join(format!("summary.{format}"));
    fs::write(&summary, render_summary(reports, format))
        .map_err(|e| Failure::Resource(format!("cannot write {}: {e}", summary.display())))?;
    for a in reports.iter().flat_map(|r| &r.artifacts) {
        let path = dir.join(&a.file);
        fs::write(&path, &a.contents)
            .map_err(|e| Failure::Resource(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<SuiteReport> {
        vec![SuiteReport {
            suite: "arith",
            checks: vec![
                Check {
                    suite: "arith",
                    name: "a",
                    kind: CheckKind::Hard,
                    passed: true,
                    detail: "n <= 10, none".into(),
                },
                Check {
                    suite: "arith",
                    name: "b",
                    kind: CheckKind::Monitor,
                    passed: false,
                    detail: "say \"hi\"".into(),
                },
            ],
            artifacts: vec![],
        }]
    }

    #[test]
    fn csv_quotes_fields() {
        let s = render_summary(&sample(), Format::Csv);
        assert_eq!(
            s,
            "suite,check,kind,status,detail\narith,a,hard,pass,\"n <= 10, none\"\narith,b,monitor,flag,\"say \"\"hi\"\"\"\n"
        );
        assert_eq!(sample()[0].hard_failures(), 0);
    }

    #[test]
    fn json_lists_checks() {
        let s = render_summary(&sample(), Format::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(v[1]["kind"], "monitor");
    }
}
