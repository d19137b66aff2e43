//! Versioned machine report (`homfinsler-report/1`) and its text rendering.
//!
//! JSON layout:
//!
//! - `schema`, `command`, `space { name, dims [h, m1, m2], family }`
//! - `seed`, `samples`
//! - `checks[]`: `name`, `residual`, `tolerance`, `verdict` (`pass`/`fail`),
//!   `samples`, `witness` (index list or vector, may be null)
//! - `verdicts`: named booleans, sorted by name
//! - `rows[]`: per-sample records whose fields depend on the command
//! - `passed`: every check passed
//!
//! Non-finite residuals are written as `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use homfinsler_core::{Check, Witness};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "homfinsler-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceInfo {
    pub name: String,
    pub dims: [usize; 3],
    pub family: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: &'static str,
    pub samples: usize,
    pub witness: Option<Value>,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        let witness = c.witness.as_ref().map(|w| match w {
            Witness::Indices(ix) => Value::from(ix.clone()),
            Witness::Vector(v) => Value::from(v.clone()),
        });
        Self {
            name: c.name.clone(),
            residual: c.residual,
            tolerance: c.tolerance,
            verdict: if c.passed { "pass" } else { "fail" },
            samples: c.samples,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub space: SpaceInfo,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
    pub verdicts: BTreeMap<String, bool>,
    pub rows: Vec<BTreeMap<String, Value>>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, space: SpaceInfo, seed: u64, samples: usize) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            space,
            seed,
            samples,
            checks: Vec::new(),
            verdicts: BTreeMap::new(),
            rows: Vec::new(),
            passed: true,
        }
    }

    pub fn push_check(&mut self, check: &Check) {
        self.passed &= check.passed;
        self.checks.push(check.into());
    }

    pub fn push_checks<'a>(&mut self, checks: impl IntoIterator<Item = &'a Check>) {
        for c in checks {
            self.push_check(c);
        }
    }

    pub fn verdict(&mut self, name: &str, value: bool) {
        self.verdicts.insert(name.to_string(), value);
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = (&'static str, Value)>) {
        self.rows.push(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let [h, m1, m2] = self.space.dims;
        let _ = writeln!(out, "{} :: {} (h={h}, m1={m1}, m2={m2}) :: {}", self.command, self.space.name, self.space.family);
        let _ = writeln!(out, "seed {} samples {}", self.seed, self.samples);
        if !self.checks.is_empty() {
            let mut table = vec![vec![
                "check".to_string(),
                "residual".into(),
                "tolerance".into(),
                "verdict".into(),
                "n".into(),
                "witness".into(),
            ]];
            for c in &self.checks {
                table.push(vec![
                    c.name.clone(),
                    format!("{:.3e}", c.residual),
                    format!("{:.1e}", c.tolerance),
                    c.verdict.to_string(),
                    c.samples.to_string(),
                    c.witness.as_ref().map(render_value).unwrap_or_else(|| "-".into()),
                ]);
            }
            out.push('\n');
            out.push_str(&align(&table));
        }
        if !self.verdicts.is_empty() {
            out.push('\n');
            let width = self.verdicts.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, v) in &self.verdicts {
                let _ = writeln!(out, "{k:<width$}  {}", if *v { "yes" } else { "no" });
            }
        }
        if let Some(first) = self.rows.first() {
            let keys: Vec<&String> = first.keys().collect();
            let mut table = vec![keys.iter().map(|k| k.to_string()).collect::<Vec<_>>()];
            for row in &self.rows {
                table.push(keys.iter().map(|k| row.get(*k).map(render_value).unwrap_or_default()).collect());
            }
            out.push('\n');
            out.push_str(&align(&table));
        }
        let _ = writeln!(out, "\nresult: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::Array(items) => format!("[{}]", items.iter().map(render_value).collect::<Vec<_>>().join(", ")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Left-aligned columns separated by two spaces.
fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s}{}", " ".repeat(widths[c] - s.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info() -> SpaceInfo {
        SpaceInfo { name: "t".into(), dims: [0, 1, 1], family: "riemannian[1.0,1.0]".into() }
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = Report::new("nr", info(), 1, 8);
        r.push_check(&Check::new("a", 0.0, 1e-9, 1));
        assert!(r.passed);
        r.push_check(&Check::new("b", f64::NAN, 1e-9, 1));
        assert!(!r.passed);
        let json = r.to_json();
        assert!(json.contains("\"residual\": null"));
        assert!(json.contains(SCHEMA));
    }

    #[test]
    fn text_columns_align() {
        let mut r = Report::new("nr", info(), 1, 8);
        r.push_check(&Check::new("short", 0.0, 1e-9, 1));
        r.push_check(&Check::new("a much longer name", 1.0, 1e-9, 1));
        let text = r.to_text();
        let header = text.lines().find(|l| l.starts_with("check")).unwrap();
        let p = header.find("residual").unwrap();
        let short = text.lines().find(|l| l.starts_with("short")).unwrap();
        let long = text.lines().find(|l| l.starts_with("a much")).unwrap();
        assert!(short[p..].starts_with("0.000e0"));
        assert!(long[p..].starts_with("1.000e0"));
    }
}
