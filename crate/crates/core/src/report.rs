//! Structured verification records.
//!
//! A [`Report`] is deterministic given its inputs: all wall-clock data lives
//! under the single top-level `timing` field, so two runs with the same
//! configuration serialize identically apart from that field.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Report-only diagnostic; never fails a run.
    Info,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Value>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        CheckRecord { name: name.into(), status, value: None, residual: None, threshold: None, detail: BTreeMap::new() }
    }

    /// PASS iff `residual < threshold`.
    pub fn below(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let mut c = Self::new(name, Status::from_bool(residual < threshold));
        c.residual = Some(residual);
        c.threshold = Some(threshold);
        c
    }

    pub fn exact(name: impl Into<String>, is_zero: bool, numeric_residual: f64) -> Self {
        let mut c = Self::new(name, Status::from_bool(is_zero));
        c.residual = Some(numeric_residual);
        c.detail.insert("exact_zero".into(), Value::Bool(is_zero));
        c
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        let mut c = Self::new(name, Status::Info);
        c.value = Some(value);
        c
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    pub fn with(mut self, key: &str, v: impl Serialize) -> Self {
        self.detail.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Timing {
    pub timestamp: String,
    pub runtimes_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub status: Status,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: Value::Null,
            checks: Vec::new(),
            status: Status::Pass,
            timing: Timing::default(),
        }
    }

    pub fn with_config(mut self, config: impl Serialize) -> Self {
        self.config = serde_json::to_value(config).unwrap_or(Value::Null);
        self
    }

    pub fn push(&mut self, check: CheckRecord) {
        if check.status == Status::Fail {
            self.status = Status::Fail;
        }
        self.checks.push(check);
    }

    /// Runs `f`, records its checks and their shared runtime.
    pub fn timed<F>(&mut self, label: &str, f: F)
    where
        F: FnOnce() -> Vec<CheckRecord>,
    {
        let t = Instant::now();
        let checks = f();
        let ms = t.elapsed().as_secs_f64() * 1e3;
        self.timing.runtimes_ms.insert(label.to_string(), ms);
        for c in checks {
            self.push(c);
        }
    }

    pub fn extend(&mut self, other: Report) {
        for c in other.checks {
            self.push(c);
        }
        self.timing.runtimes_ms.extend(other.timing.runtimes_ms);
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per check: name, status, value, residual, threshold, detail (JSON).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["command", "name", "status", "value", "residual", "threshold", "detail"])?;
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for c in &self.checks {
            let status = serde_json::to_value(c.status)?;
            w.write_record([
                self.command.as_str(),
                c.name.as_str(),
                status.as_str().unwrap_or_default(),
                &num(c.value),
                &num(c.residual),
                &num(c.threshold),
                &serde_json::to_string(&c.detail)?,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    pub fn write(&self, dir: &Path, csv: bool) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let (ext, body) = if csv { ("csv", self.to_csv()?) } else { ("json", self.to_json()?) };
        let path = dir.join(format!("{}.{}", self.command, ext));
        let mut f = std::fs::File::create(&path)?;
        f.write_all(body.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_aggregates_and_info_never_fails() {
        let mut r = Report::new("demo");
        r.push(CheckRecord::info("note", 3.0));
        assert!(r.passed());
        r.push(CheckRecord::below("tight", 1e-3, 1e-6));
        assert!(!r.passed());
        assert_eq!(r.failing(), vec!["tight"]);
    }

    #[test]
    fn csv_has_one_row_per_check() {
        let mut r = Report::new("demo");
        r.push(CheckRecord::exact("zero", true, 0.0));
        r.push(CheckRecord::info("v", 1.5).with("n", 3));
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("PASS"));
    }
}
