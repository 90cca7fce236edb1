//! Reports and their three output formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA: &str = "pdseq-report/1";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// One line of plot data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub h: i64,
    pub target: Option<f64>,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub seed: Option<pdseq::SeedRecord>,
    pub summary: BTreeMap<String, Value>,
    pub table: Table,
    pub plot: Option<Vec<PlotRow>>,
    /// Seconds spent in the command; the only field that varies between reruns.
    pub wall_clock_seconds: f64,
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

impl Report {
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_structured(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_rows(&self) -> String {
        let mut s = format!("# {} {}\n", self.schema, self.command);
        s.push_str(&self.table.columns.join("\t"));
        s.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            s.push_str(&cells.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn to_plotdata(&self) -> Option<String> {
        let plot = self.plot.as_ref()?;
        let mut s = String::from("h\ttarget\testimate_re\testimate_im\tradius\n");
        let opt = |x: Option<f64>| x.map_or("nan".to_string(), |v| v.to_string());
        for r in plot {
            let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.h, opt(r.target), r.estimate_re, r.estimate_im, opt(r.radius));
        }
        Some(s)
    }

    /// Writes every output named in the config's `out` table.
    pub fn emit(&self) -> Result<(), CliError> {
        let out = &self.config.out;
        if let Some(p) = &out.structured {
            write(p, &self.to_structured())?;
        }
        if let Some(p) = &out.rows {
            write(p, &self.to_rows())?;
        }
        if let Some(p) = &out.plotdata {
            let text = self.to_plotdata().ok_or_else(|| CliError::Validation {
                field: "out.plotdata".into(),
                message: format!("`{}` produces no per-lag data", self.command),
            })?;
            write(p, &text)?;
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
