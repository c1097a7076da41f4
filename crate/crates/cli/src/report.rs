//! Versioned report emitted by every subcommand.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use dwq_core::quantum::ResidualRecord;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dwq-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `None` for values that are reported but not asserted.
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub status: &'static str,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    /// Residuals of discretized operators, one per grid.
    pub records: Vec<ResidualRecord>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            status: "pass",
            seed,
            checks: Vec::new(),
            tables: Vec::new(),
            warnings: Vec::new(),
            records: Vec::new(),
        }
    }

    /// Asserted check: `|value| ≤ tolerance`.
    pub fn bound(&mut self, name: &str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: value.abs() <= tolerance,
        });
    }

    /// Asserted check with an externally decided outcome.
    pub fn check(&mut self, name: &str, value: f64, tolerance: Option<f64>, pass: bool) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
            pass,
        });
    }

    pub fn note(&mut self, name: &str, value: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance: None,
            pass: true,
        });
    }

    pub fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    /// Sets `status` from the checks; true when everything passed.
    pub fn finish(&mut self) -> bool {
        let ok = self.checks.iter().all(|c| c.pass);
        self.status = if ok { "pass" } else { "fail" };
        ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            writeln!(out, "== {} ==", t.name).unwrap();
            writeln!(out, "{}", t.columns.join("\t")).unwrap();
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(cell_text).collect();
                writeln!(out, "{}", cells.join("\t")).unwrap();
            }
            out.push('\n');
        }
        for c in &self.checks {
            let verdict = match (c.tolerance, c.pass) {
                (None, _) => "INFO",
                (Some(_), true) => "PASS",
                (Some(_), false) => "FAIL",
            };
            let value = if c.value.fract() == 0.0 && c.value.abs() < 1e12 {
                format!("{}", c.value)
            } else {
                format!("{:.6e}", c.value)
            };
            match c.tolerance {
                Some(t) => writeln!(out, "{verdict} {}: {value} (tolerance {t:.1e})", c.name),
                None => writeln!(out, "{verdict} {}: {value}", c.name),
            }
            .unwrap();
        }
        for w in &self.warnings {
            writeln!(out, "WARNING {w}").unwrap();
        }
        writeln!(out, "{}: {}", self.command, self.status.to_uppercase()).unwrap();
        out
    }

    /// `report.json` plus one CSV per table.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name)))?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(cell_text))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Number(n) => match n.as_f64() {
            // shortest representation that round-trips
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:?}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_checks() {
        let mut r = Report::new("demo", 1);
        r.bound("small", 1e-12, 1e-10);
        r.note("info", 3.0);
        assert!(r.finish());
        r.bound("large", 1.0, 1e-10);
        assert!(!r.finish());
        assert_eq!(r.status, "fail");
    }

    #[test]
    fn json_carries_the_schema() {
        let r = Report::new("demo", 7);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["seed"], 7);
    }
}
