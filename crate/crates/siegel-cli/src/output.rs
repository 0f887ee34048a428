use std::io::Write;

use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format!("{:e}", v + 0.0),
            Cell::Int(v) => v.to_string(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num(v) => serde_json::Number::from_f64(*v + 0.0).map(Value::Number).unwrap_or_else(|| Value::String(v.to_string())),
            Cell::Int(v) => Value::from(*v),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: impl Write) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for r in &self.rows {
            out.write_record(r.iter().map(Cell::csv))?;
        }
        out.flush()
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Rows comparing a computed value to an expected one.
#[derive(Default)]
pub struct Checks {
    table: Table,
    first_failure: Option<String>,
}

pub const CHECK_COLUMNS: [&str; 7] = ["group", "quantity", "computed", "expected", "residual", "tolerance", "pass"];

impl Checks {
    pub fn new() -> Self {
        Self { table: Table::new(&CHECK_COLUMNS), first_failure: None }
    }

    /// Records |computed − expected| against `tol`.
    pub fn compare(&mut self, group: &str, quantity: &str, computed: f64, expected: f64, tol: f64) {
        self.residual(group, quantity, computed, expected, (computed - expected).abs(), tol);
    }

    /// Records a precomputed residual, passing when it is below `tol`.
    pub fn residual(&mut self, group: &str, quantity: &str, computed: f64, expected: f64, residual: f64, tol: f64) {
        let pass = residual < tol;
        if !pass && self.first_failure.is_none() {
            self.first_failure = Some(format!("{group}: {quantity}"));
        }
        self.table.push(vec![group.into(), quantity.into(), computed.into(), expected.into(), residual.into(), tol.into(), pass.into()]);
    }

    /// Records a failure that produced no number.
    pub fn error(&mut self, group: &str, quantity: &str, msg: &str) {
        if self.first_failure.is_none() {
            self.first_failure = Some(format!("{group}: {quantity}: {msg}"));
        }
        self.table.push(vec![group.into(), format!("{quantity} ({msg})").into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), false.into()]);
    }

    pub fn finish(self) -> Report {
        Report { table: self.table, json: None, failure: self.first_failure }
    }
}

/// A command result: the table written as CSV, an optional JSON document
/// that replaces the table in JSON output, and the first failing row.
pub struct Report {
    pub table: Table,
    pub json: Option<Value>,
    pub failure: Option<String>,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Self { table, json: None, failure: None }
    }
}
