//! Run reports and their JSON / CSV renderings.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One cell of the tabular (CSV) form.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every binary64 value.
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
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

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

/// Compact JSON with every float written to 17 significant digits.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub results: Value,
    pub seed: u64,
    pub table: Table,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            results: Value::Null,
            seed,
            table: Table::default(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json_value(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        json!({
            "command": self.command,
            "params": params,
            "results": self.results,
            "seed": self.seed,
            "version": VERSION,
        })
    }

    /// One JSON object per line. Non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
        self.to_json_value().serialize(&mut ser).expect("report serializes");
        buf.push(b'\n');
        String::from_utf8(buf).expect("utf8")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.table.header).expect("in-memory write");
        for row in &self.table.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}
