//! Verdict records shared by every command.
//!
//! A report echoes its configuration, carries named numeric checks with a
//! source tag and optional tables for plotting. Only gated checks decide the
//! overall verdict; ungated ones are observations.

use crate::{Error, Result, VERSION};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Where the expected value of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// A value or statement taken from the mathematics being tested.
    Paper,
    /// An identity that holds for elementary reasons.
    Trivial,
    /// An independent computation inside this crate.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub expected: Option<f64>,
    pub tol: Option<f64>,
    pub provenance: Source,
    pub gated: bool,
}

/// Columns of numbers, exported as CSV next to the JSON report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub operation: String,
    pub version: String,
    pub config: serde_json::Value,
    /// Numerical conventions the values depend on.
    pub conventions: Vec<String>,
    pub values: BTreeMap<String, serde_json::Value>,
    pub checks: Vec<Check>,
    pub tables: BTreeMap<String, Table>,
    /// Set when the command stopped on an error; the report is still valid JSON.
    pub error: Option<String>,
}

impl Report {
    pub fn new(operation: &str, config: serde_json::Value) -> Self {
        Report {
            operation: operation.to_string(),
            version: VERSION.to_string(),
            config,
            conventions: Vec::new(),
            values: BTreeMap::new(),
            checks: Vec::new(),
            tables: BTreeMap::new(),
            error: None,
        }
    }

    pub fn convention(&mut self, text: &str) -> &mut Self {
        self.conventions.push(text.to_string());
        self
    }

    /// Stores any serializable value under `key`.
    pub fn value<T: Serialize>(&mut self, key: &str, v: &T) -> Result<&mut Self> {
        self.values.insert(key.to_string(), serde_json::to_value(v)?);
        Ok(self)
    }

    pub fn table(&mut self, key: &str, t: Table) -> &mut Self {
        self.tables.insert(key.to_string(), t);
        self
    }

    fn push(&mut self, check: Check) -> bool {
        let pass = check.pass;
        self.checks.push(check);
        pass
    }

    /// `|value − expected| ≤ tol·max(1, |expected|)`.
    pub fn check_close(&mut self, name: &str, value: f64, expected: f64, tol: f64, src: Source) -> bool {
        let pass = (value - expected).abs() <= tol * expected.abs().max(1.0);
        self.push(Check { name: name.into(), pass, value, expected: Some(expected), tol: Some(tol), provenance: src, gated: true })
    }

    /// `|value − expected| ≤ tol·|expected|`.
    pub fn check_relative(&mut self, name: &str, value: f64, expected: f64, tol: f64, src: Source) -> bool {
        let pass = (value - expected).abs() <= tol * expected.abs();
        self.push(Check { name: name.into(), pass, value, expected: Some(expected), tol: Some(tol), provenance: src, gated: true })
    }

    /// `value ≤ bound`.
    pub fn check_at_most(&mut self, name: &str, value: f64, bound: f64, src: Source) -> bool {
        let pass = value <= bound;
        self.push(Check { name: name.into(), pass, value, expected: Some(bound), tol: None, provenance: src, gated: true })
    }

    /// `value ≥ bound`.
    pub fn check_at_least(&mut self, name: &str, value: f64, bound: f64, src: Source) -> bool {
        let pass = value >= bound;
        self.push(Check { name: name.into(), pass, value, expected: Some(bound), tol: None, provenance: src, gated: true })
    }

    /// A yes/no property recorded with value 1 or 0.
    pub fn check_flag(&mut self, name: &str, pass: bool, src: Source) -> bool {
        let value = if pass { 1.0 } else { 0.0 };
        self.push(Check { name: name.into(), pass, value, expected: Some(1.0), tol: None, provenance: src, gated: true })
    }

    /// An ungated observation.
    pub fn observe(&mut self, name: &str, value: f64, src: Source) {
        self.checks.push(Check { name: name.into(), pass: true, value, expected: None, tol: None, provenance: src, gated: false });
    }

    /// All gated checks pass and no error was recorded.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().filter(|c| c.gated).all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.gated && !c.pass).collect()
    }

    /// Structural checks beyond what serde enforces.
    pub fn validate(&self) -> Result<()> {
        if self.operation.is_empty() {
            return Err(Error::Invalid("report without operation".into()));
        }
        for c in &self.checks {
            if c.name.is_empty() {
                return Err(Error::Invalid("unnamed check".into()));
            }
            if c.gated && c.pass && c.value.is_nan() {
                return Err(Error::Invalid(format!("check {} passes with NaN", c.name)));
            }
        }
        for (k, t) in &self.tables {
            if t.rows.iter().any(|r| r.len() != t.columns.len()) {
                return Err(Error::Invalid(format!("table {k} has ragged rows")));
            }
        }
        Ok(())
    }

    /// Pretty JSON. Non-finite numbers become null.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(s)?;
        r.validate()?;
        Ok(r)
    }

    /// Writes `<stem>.json` and, when asked, one `<stem>.<table>.csv` per table.
    pub fn write(&self, json_path: &Path, with_csv: bool) -> Result<Vec<PathBuf>> {
        std::fs::write(json_path, self.to_json()? + "\n")?;
        let mut written = vec![json_path.to_path_buf()];
        if with_csv {
            let stem = json_path.with_extension("");
            for (k, t) in &self.tables {
                let p = PathBuf::from(format!("{}.{k}.csv", stem.display()));
                t.write_csv(&p)?;
                written.push(p);
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_ignores_observations() {
        let mut r = Report::new("demo", serde_json::json!({"seed": 1}));
        assert!(r.check_close("a", 1.0 + 1e-12, 1.0, 1e-9, Source::Trivial));
        r.observe("ratio", 7.0, Source::Derived);
        assert!(r.passed());
        assert!(!r.check_at_most("b", 2.0, 1.0, Source::Paper));
        assert!(!r.passed());
        assert_eq!(r.failed_checks().len(), 1);
    }

    #[test]
    fn relative_and_absolute_tolerances() {
        let mut r = Report::new("demo", serde_json::Value::Null);
        assert!(r.check_close("small", 1e-12, 0.0, 1e-9, Source::Trivial));
        assert!(!r.check_relative("small-rel", 1e-12, 0.0, 1e-9, Source::Trivial));
        assert!(r.check_relative("big", 1e6 + 1e-4, 1e6, 1e-9, Source::Trivial));
    }

    #[test]
    fn json_round_trip_and_csv() {
        let mut r = Report::new("demo", serde_json::json!({"p": 4}));
        r.convention("τ normalized");
        r.value("x", &[1.0, 2.0]).unwrap();
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![0.5, 0.25]);
        r.table("curve", t);
        r.check_flag("ok", true, Source::Derived);
        let back = Report::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let dir = tempfile::tempdir().unwrap();
        let files = r.write(&dir.path().join("out.json"), true).unwrap();
        assert_eq!(files.len(), 2);
        let csv = std::fs::read_to_string(&files[1]).unwrap();
        assert!(csv.starts_with("x,y\n5.00000000000000000e-1"));
    }

    #[test]
    fn ragged_table_is_rejected() {
        let mut r = Report::new("demo", serde_json::Value::Null);
        r.table("t", Table { columns: vec!["a".into()], rows: vec![vec![1.0, 2.0]] });
        assert!(r.validate().is_err());
    }
}
