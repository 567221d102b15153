//! Typed result tables and their CSV/JSON encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn opt_float(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Float)
    }

    fn to_csv_field(&self) -> String {
        match self {
            Value::Float(x) => format_float(*x),
            Value::Int(i) => i.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n as i64)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

/// Shortest round-trip decimal; scientific notation when `|x| > 1e6` or
/// `0 < |x| < 1e-4`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        return "0".to_string();
    }
    if a.is_finite() && !(1e-4..=1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub scenario: String,
    pub config_hash: String,
    pub tool_version: String,
    /// Seconds since the epoch, from `SOURCE_DATE_EPOCH`; absent otherwise so
    /// that repeated runs are byte-identical.
    pub timestamp: Option<u64>,
    pub columns: Vec<String>,
    pub summary: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    pub meta: Meta,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    meta: &'a Meta,
    rows: &'a [Vec<Value>],
}

pub fn source_date_epoch() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        ResultTable {
            meta: Meta {
                scenario: String::new(),
                config_hash: String::new(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: source_date_epoch(),
                columns: columns.clone(),
                summary: BTreeMap::new(),
            },
            columns,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn push_row(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::RaggedRow {
                expected: self.columns.len(),
                actual: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.summary.insert(key.to_string(), value.into());
    }

    pub fn to_csv(&self) -> Result<String> {
        let err = |e: csv::Error| CliError::Serialize(e.to_string());
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::to_csv_field)).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = JsonTable {
            meta: &self.meta,
            rows: &self.rows,
        };
        let mut s =
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::Serialize(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    // downstream closed early (`| head`); nothing left to report
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    r => r.map_err(|source| CliError::Write {
                        path: "<stdout>".into(),
                        source,
                    }),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_thresholds() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1e6), "1000000");
        assert_eq!(format_float(1.5e6), "1.5e6");
        assert_eq!(format_float(-2e-5), "-2e-5");
        assert_eq!(format_float(1e-4), "0.0001");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(["a", "b,c"]);
        assert_eq!(t.to_csv().unwrap(), "a,\"b,c\"\n");
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new(["a", "b"]);
        assert!(t.push_row(vec![1.0.into()]).is_err());
        assert!(t.push_row(vec![1.0.into(), Value::Null]).is_ok());
        assert_eq!(t.rows().len(), 1);
    }

    #[test]
    fn json_has_meta_and_rows() {
        let mut t = ResultTable::new(["x"]);
        t.meta.config_hash = "abc".into();
        t.push_row(vec![Value::Float(2.5)]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v["meta"]["config_hash"], "abc");
        assert_eq!(v["meta"]["columns"][0], "x");
        assert_eq!(v["rows"][0][0], 2.5);
    }

    #[test]
    fn text_fields_are_quoted() {
        let mut t = ResultTable::new(["s"]);
        t.push_row(vec![Value::text("say \"hi\", twice")]).unwrap();
        assert_eq!(t.to_csv().unwrap(), "s\n\"say \"\"hi\"\", twice\"\n");
    }
}
