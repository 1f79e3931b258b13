//! Table model shared by every subcommand, rendered as CSV or JSON.
//! Both renderings open with the artifact version, keep a frozen
//! column order, and are byte-deterministic for a fixed run
//! configuration.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

/// Version stamped into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell.  Text cells never contain commas or quotes, so CSV
/// rows need no escaping.
pub enum Cell {
    Count(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// Cell holding a nonnegative integer.
    pub fn count(v: usize) -> Self {
        Cell::Count(v as u64)
    }

    /// Cell holding a float; non-finite values become JSON null.
    pub fn float(v: f64) -> Self {
        Cell::Float(v)
    }

    /// Cell holding plain text (rationals, variant names).
    pub fn text(v: impl Into<String>) -> Self {
        Cell::Text(v.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Count(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Count(v) => Value::from(*v),
            Cell::Float(v) => Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(v) => Value::from(v.as_str()),
        }
    }
}

/// Column-ordered rows plus named extras such as fit summaries.
pub struct Table {
    command: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    extras: Vec<(&'static str, Value)>,
}

impl Table {
    /// Empty table with a frozen column list.
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Table {
            command,
            columns,
            rows: Vec::new(),
            extras: Vec::new(),
        }
    }

    /// Appends one row; the cell count must match the columns.
    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Attaches a named summary rendered after the rows.
    pub fn extra(&mut self, name: &'static str, value: Value) {
        self.extras.push((name, value));
    }

    /// CSV with a version comment, a column header row, data rows, and
    /// one trailing comment per extra (compact JSON payload).
    pub fn to_csv(&self) -> String {
        let mut out = format!("# motzkinlab {} {}\n", VERSION, self.command);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        for (name, value) in &self.extras {
            out.push_str(&format!("# {name} {value}\n"));
        }
        out
    }

    /// JSON object whose rows mirror the CSV columns as keys; extras
    /// become top-level keys.
    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("artifact".into(), Value::from("motzkinlab"));
        root.insert("version".into(), Value::from(VERSION));
        root.insert("command".into(), Value::from(self.command));
        root.insert(
            "columns".into(),
            Value::from(self.columns.iter().map(|c| Value::from(*c)).collect::<Vec<_>>()),
        );
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert((*col).into(), cell.json());
                }
                Value::Object(obj)
            })
            .collect();
        root.insert("rows".into(), Value::from(rows));
        for (name, value) in &self.extras {
            root.insert((*name).into(), value.clone());
        }
        let mut text =
            serde_json::to_string_pretty(&Value::Object(root)).expect("in-memory serialization");
        text.push('\n');
        text
    }
}

/// Writes to stdout, or atomically to a file through a temp file in
/// the same directory so a crash never leaves a partial artifact.
pub fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => std::io::stdout().write_all(text.as_bytes()),
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(p).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", vec!["n", "value", "name"]);
        t.row(vec![Cell::count(3), Cell::float(0.25), Cell::text("a/b")]);
        t.row(vec![Cell::count(4), Cell::float(f64::NAN), Cell::text("c")]);
        t.extra("fit", serde_json::json!({ "slope": -1.5 }));
        t
    }

    #[test]
    fn csv_layout_is_header_rows_extras() {
        let text = sample().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# motzkinlab {VERSION} demo"));
        assert_eq!(lines[1], "n,value,name");
        assert_eq!(lines[2], "3,0.25,a/b");
        assert_eq!(lines[3], "4,NaN,c");
        assert_eq!(lines[4], "# fit {\"slope\":-1.5}");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_rows_mirror_columns_and_nan_becomes_null() {
        let text = sample().to_json();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["artifact"], "motzkinlab");
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["command"], "demo");
        assert_eq!(v["columns"][2], "name");
        assert_eq!(v["rows"][0]["n"], 3);
        assert_eq!(v["rows"][0]["value"], 0.25);
        assert_eq!(v["rows"][1]["value"], Value::Null);
        assert_eq!(v["fit"]["slope"], -1.5);
    }

    #[test]
    fn file_output_lands_atomically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        write_output(Some(&path), &sample().to_csv()).unwrap();
        let back = std::fs::read_to_string(&path).unwrap();
        assert_eq!(back, sample().to_csv());
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name() != "table.csv")
            .collect();
        assert!(leftovers.is_empty());
    }
}
