//! Rendering of command reports as aligned tables, CSV or JSON.

use clap::ValueEnum;
use serde_json::Value;

/// Bumped whenever a JSON field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn table(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() && v.abs() >= 1e6 => format!("{v:.6e}"),
            Cell::Num(v) if v.is_finite() => format!("{v:.6}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    // Full precision: the shortest representation that parses back exactly.
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            other => other.table(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces. Rendering happens once, at the end.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub table: Table,
    /// Free-form lines shown under the table.
    pub notes: Vec<String>,
    /// Command-specific JSON payload, merged next to `schema_version`.
    pub json: Value,
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Table => render_table(report),
        Format::Csv => render_csv(&report.table),
        Format::Json => render_json(report),
    }
}

fn render_table(report: &Report) -> String {
    let t = &report.table;
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
    let widths: Vec<usize> = t
        .columns
        .iter()
        .enumerate()
        .map(|(i, h)| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain(std::iter::once(h.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: &[String]| {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&t.columns));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    out.push('\n');
    for r in &cells {
        out.push_str(&line(r));
        out.push('\n');
    }
    for n in &report.notes {
        out.push_str(n);
        out.push('\n');
    }
    out
}

fn render_csv(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for r in &table.rows {
        w.write_record(r.iter().map(Cell::csv)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
}

fn render_json(report: &Report) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    obj.insert("command".into(), report.command.into());
    obj.insert("notes".into(), report.notes.clone().into());
    if let Value::Object(payload) = &report.json {
        for (k, v) in payload {
            obj.insert(k.clone(), v.clone());
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}
