use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

/// Bumped whenever a column schema changes.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub format_version: u32,
    pub subcommand: String,
    pub config: Value,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub header: Header,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    /// Some acceptance gate of this run failed.
    #[serde(skip)]
    pub gate_failed: bool,
}

impl Report {
    pub fn new(subcommand: &str, config: Value, columns: &[&str]) -> Self {
        Self {
            header: Header {
                tool: "qdlab",
                version: env!("CARGO_PKG_VERSION"),
                format_version: FORMAT_VERSION,
                subcommand: subcommand.to_string(),
                config,
            },
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Map::new(),
            gate_failed: false,
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set<V: Serialize>(&mut self, key: &str, value: V) {
        let v = serde_json::to_value(value).expect("summary values serialize");
        self.summary.insert(key.to_string(), v);
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, self)?;
                writeln!(w)
            }
            Format::Csv => self.write_csv(w),
        }
    }

    fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let h = &self.header;
        writeln!(w, "# tool: {}", h.tool)?;
        writeln!(w, "# version: {}", h.version)?;
        writeln!(w, "# format_version: {}", h.format_version)?;
        writeln!(w, "# subcommand: {}", h.subcommand)?;
        writeln!(w, "# config: {}", h.config)?;
        {
            let mut table = csv::Writer::from_writer(&mut w);
            table.write_record(&self.columns)?;
            for row in &self.rows {
                table.write_record(row.iter().map(cell))?;
            }
            table.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(w, "# summary.{k}: {}", cell(v))?;
        }
        Ok(())
    }
}

/// Text of one CSV cell; missing values are `NA`.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => "NA".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON number, or null for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new("demo", json!({"n": 3}), &["a", "b"]);
        r.push_row(vec![json!(1), num(0.5)]);
        r.push_row(vec![json!("x,y"), Value::Null]);
        r.set("value", 2);
        r
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        sample().write(Format::Csv, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool: qdlab");
        assert_eq!(lines[4], r#"# config: {"n":3}"#);
        assert_eq!(&lines[5..8], &["a,b", "1,0.5", "\"x,y\",NA"]);
        assert_eq!(lines[8], "# summary.value: 2");
    }

    #[test]
    fn json_layout() {
        let mut out = Vec::new();
        sample().write(Format::Json, &mut out).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["columns"], json!(["a", "b"]));
        assert_eq!(v["rows"], json!([[1, 0.5], ["x,y", null]]));
        assert_eq!(v["header"]["format_version"], json!(FORMAT_VERSION));
        assert!(v.get("gate_failed").is_none());
    }

    #[test]
    fn non_finite_numbers_are_missing() {
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(cell(&opt(None)), "NA");
    }
}
