use std::fs::File;
use std::io::{self, Write};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Real(v) if v.is_nan() => "NaN".to_string(),
            Cell::Real(v) => if *v > 0.0 { "inf" } else { "-inf" }.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Real(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write `{path}`: {source}")]
    Io { path: String, source: io::Error },
    #[error("cannot write `{path}`: {source}")]
    Csv { path: String, source: csv::Error },
}

fn write_table<W: Write>(table: &Table, format: Format, out: W, path: &str) -> Result<(), EmitError> {
    let io_err = |source| EmitError::Io {
        path: path.to_string(),
        source,
    };
    match format {
        Format::Csv => {
            let csv_err = |source| EmitError::Csv {
                path: path.to_string(),
                source,
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::json).collect::<Vec<_>>().into())
                .collect();
            let doc = serde_json::json!({ "columns": table.columns, "rows": rows });
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| io_err(e.into()))?;
            out.write_all(b"\n").map_err(io_err)?;
            out.flush().map_err(io_err)
        }
    }
}

/// Writes `table` to `path`, or to standard output when `path` is `-`.
pub fn emit_table(table: &Table, format: Format, path: &str) -> Result<(), EmitError> {
    if path == "-" {
        let stdout = io::stdout();
        write_table(table, format, stdout.lock(), "<stdout>")
    } else {
        let file = File::create(path).map_err(|source| EmitError::Io {
            path: path.to_string(),
            source,
        })?;
        write_table(table, format, io::BufWriter::new(file), path)
    }
}

/// The bytes [`emit_table`] would write.
pub fn render_table(table: &Table, format: Format) -> Result<Vec<u8>, EmitError> {
    let mut buf = Vec::new();
    write_table(table, format, &mut buf, "<memory>")?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["alpha", "n", "label"]);
        t.push(vec![Cell::Real(0.1), Cell::Int(3), Cell::Text("HH".into())]);
        t.push(vec![Cell::Real(f64::NAN), Cell::Int(0), Cell::Text("a,b".into())]);
        t
    }

    #[test]
    fn csv_has_header_and_seventeen_digits() {
        let text = String::from_utf8(render_table(&sample(), Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha,n,label");
        assert_eq!(lines[1], "1.0000000000000001e-1,3,HH");
        assert_eq!(lines[2], "NaN,0,\"a,b\"");
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_lists_columns_and_rows() {
        let text = render_table(&sample(), Format::Json).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&text).unwrap();
        assert_eq!(doc["columns"][2], "label");
        assert_eq!(doc["rows"][0][0], 0.1);
        assert!(doc["rows"][1][0].is_null());
    }

    #[test]
    fn io_failure_names_the_path() {
        let err = emit_table(&sample(), Format::Csv, "/nonexistent-dir/x.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
