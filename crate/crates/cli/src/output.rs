use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

/// Shortest round-trip decimal; non-finite values spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        ryu::Buffer::new().format_finite(x).to_string()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Table {
            file: file.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Failed(format!("csv: {e}"));
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Failed(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// What a command hands back for printing.
#[derive(Debug, Default)]
pub struct Outcome {
    pub payload: Value,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    /// Printed normally, then turned into the exit code.
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn new(payload: Value) -> Self {
        Outcome {
            payload,
            ..Default::default()
        }
    }
}

/// Rebuild every object with keys in sorted order, whatever map
/// implementation serde_json was compiled with.
pub fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, sorted(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

pub struct Envelope<'a> {
    pub command: &'a str,
    pub instance: &'a str,
    pub wall_time_s: f64,
    pub payload: Value,
    pub warnings: &'a [String],
    pub error: Option<(i32, String)>,
}

impl Envelope<'_> {
    pub fn to_json(&self) -> String {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("instance".into(), self.instance.into());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("wall_time_s".into(), self.wall_time_s.into());
        m.insert("payload".into(), self.payload.clone());
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().map(|w| w.as_str().into()).collect()),
        );
        if let Some((code, msg)) = &self.error {
            let mut e = Map::new();
            e.insert("exit_code".into(), (*code).into());
            e.insert("message".into(), msg.as_str().into());
            m.insert("error".into(), Value::Object(e));
        }
        let mut s = serde_json::to_string_pretty(&sorted(Value::Object(m))).expect("json value serializes");
        s.push('\n');
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => num(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        _ => unreachable!(),
    }
}

fn is_flat_array(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()))
}

fn human_into(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for k in keys {
                let x = &m[k];
                if x.is_object() || (x.is_array() && !is_flat_array(x)) {
                    let _ = writeln!(out, "{pad}{k}:");
                    human_into(out, x, indent + 1);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                if x.is_object() || (x.is_array() && !is_flat_array(x)) {
                    let _ = writeln!(out, "{pad}[{i}]");
                    human_into(out, x, indent + 1);
                } else {
                    let _ = writeln!(out, "{pad}[{i}] {}", inline(x));
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("({})", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar(other),
    }
}

pub fn human(v: &Value) -> String {
    let mut s = String::new();
    human_into(&mut s, v, 0);
    s
}

/// Flattened `key,value` rows for commands without a natural table.
pub fn flatten(v: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, t: &mut Table) {
        match v {
            Value::Object(m) => {
                let mut keys: Vec<&String> = m.keys().collect();
                keys.sort();
                for k in keys {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, &m[k], t);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, t);
                }
            }
            other => t.push(vec![prefix.to_string(), scalar(other)]),
        }
    }
    let mut t = Table::new("report.csv", &["key", "value"]);
    walk("", v, &mut t);
    t
}

/// Plain-text rendering of a table with aligned columns.
pub fn aligned(t: &Table) -> String {
    let mut width: Vec<usize> = t.header.iter().map(|h| h.len()).collect();
    for r in &t.rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut s = String::new();
    let line = |s: &mut String, cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(&mut s, &t.header);
    for r in &t.rows {
        line(&mut s, r);
    }
    s
}

pub fn write_tables(dir: &Path, tables: &[Table]) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(&t.file);
        std::fs::write(&path, t.to_csv()?)?;
        written.push(path.display().to_string());
    }
    Ok(written)
}
