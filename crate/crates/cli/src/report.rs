// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{validation, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    pub passed: usize,
    pub pass: bool,
    /// One line per flagged instance or check.
    pub flagged: Vec<String>,
    /// Worst residuals, smallest slacks, largest gaps.
    pub extremes: BTreeMap<String, Value>,
    pub thresholds: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// Only present with `--timing`; it would break byte-identical reruns.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

impl Summary {
    pub fn new(instances: usize) -> Self {
        Summary {
            instances,
            passed: 0,
            pass: true,
            flagged: Vec::new(),
            extremes: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            notes: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn flag(&mut self, line: impl Into<String>) {
        self.pass = false;
        self.flagged.push(line.into());
    }

    pub fn extreme(&mut self, key: &str, value: f64) {
        self.extremes.insert(key.to_string(), number(value));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub records: Vec<Value>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        serde_json::from_str(s).map_err(|e| validation(format!("report: {e}")))
    }

    /// Human-readable rendering: config, summary, then one row per record
    /// holding its scalar fields.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(out, "  {k} = {}", scalar(v));
        }
        let s = &self.summary;
        let _ = writeln!(out, "summary: {}/{} passed, {}", s.passed, s.instances, if s.pass { "PASS" } else { "FAIL" });
        for (k, v) in &s.extremes {
            let _ = writeln!(out, "  {k} = {}", scalar(v));
        }
        for (k, v) in &s.thresholds {
            let _ = writeln!(out, "  threshold {k} = {v:e}");
        }
        for line in &s.flagged {
            let _ = writeln!(out, "  flagged: {line}");
        }
        for line in &s.notes {
            let _ = writeln!(out, "  note: {line}");
        }
        let columns: Vec<String> = {
            let mut cols: Vec<String> = Vec::new();
            for r in &self.records {
                if let Value::Object(map) = r {
                    for (k, v) in map {
                        if !v.is_object() && !v.is_array() && !cols.contains(k) {
                            cols.push(k.clone());
                        }
                    }
                }
            }
            cols
        };
        if !columns.is_empty() {
            let rows: Vec<Vec<String>> = self
                .records
                .iter()
                .map(|r| columns.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = columns
                .iter()
                .enumerate()
                .map(|(i, c)| rows.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(&columns));
            for row in &rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        out
    }
}

/// JSON number, or `null` for non-finite values.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}
