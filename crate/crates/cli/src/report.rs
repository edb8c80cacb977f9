//! Tabular reports rendered as CSV or as a single JSON object.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::Result;

pub const SCHEMA: &str = "gsq-report/1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Seventeen significant digits, so every value round-trips exactly.
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    /// Command-specific diagnostics, JSON output only.
    pub details: Value,
}

impl Report {
    pub fn new(config: &RunConfig, columns: &'static [&'static str]) -> Self {
        Self {
            config: config.clone(),
            columns,
            rows: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_details(mut self, details: impl Serialize) -> Result<Self> {
        self.details = serde_json::to_value(details)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<Value> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Ok(json!({
            "schema": SCHEMA,
            "command": self.config.command.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "config": serde_json::to_value(&self.config)?,
            "columns": self.columns,
            "rows": rows,
            "details": self.details,
        }))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(Cell::csv))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        match self.config.format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json()?)?;
                writeln!(w)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Command, Flags};

    fn report() -> Report {
        let cfg = RunConfig::resolve(Command::SweepChi, &Flags::default()).unwrap();
        let mut r = Report::new(&cfg, &["a", "b", "c"]);
        r.push(vec![0.1.into(), f64::INFINITY.into(), true.into()]);
        r
    }

    #[test]
    fn csv_round_trips_and_marks_infinity() {
        let mut buf = Vec::new();
        report().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("a,b,c"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.1);
        assert_eq!(row[1], "inf");
    }

    #[test]
    fn json_nulls_non_finite_values() {
        let v = report().to_json().unwrap();
        assert_eq!(v["rows"][0]["b"], Value::Null);
        assert_eq!(v["config"]["command"], "sweep-chi");
    }
}
