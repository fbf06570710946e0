//! Run reports and their CSV / JSON renderings.
//!
//! Floats are always printed as `{:.16e}` (17 significant digits), JSON
//! object keys are sorted, so equal inputs give byte-identical output.

use std::collections::BTreeMap;
use std::str::FromStr;

use gravloop::deutsch_jozsa::verdict_threshold;
use gravloop::loop_interferometer::BRANCH_CONVENTION;
use gravloop::scalar::tolerance;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// `{:.16e}` with an explicitly signed exponent, e.g. `1.0000000000000000e+0`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else {
        x.to_string()
    }
}

/// A JSON number carrying the fixed textual form; non-finite values become
/// strings since JSON has no literal for them.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_float(x)).expect("formatted float is a JSON number"))
    } else {
        Value::String(x.to_string())
    }
}

pub fn complex(re: f64, im: f64) -> Value {
    Value::Array(vec![num(re), num(im)])
}

/// Rewrites every non-integer number in `v` into the fixed float form.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect())
        }
        other => other,
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub params: BTreeMap<String, Value>,
    pub summary: BTreeMap<String, Value>,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl RunReport {
    pub fn new(command: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            command,
            params: BTreeMap::new(),
            summary: BTreeMap::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_string(), value);
    }

    pub fn summary(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_json(&self) -> String {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.into()));
        top.insert(
            "metadata".into(),
            Value::Object(metadata().into_iter().collect()),
        );
        top.insert(
            "params".into(),
            Value::Object(self.params.clone().into_iter().collect()),
        );
        top.insert(
            "summary".into(),
            Value::Object(self.summary.clone().into_iter().collect()),
        );
        top.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("report serializes");
        s.push('\n');
        s
    }

    /// Metadata, parameters and summary go into `#` comment lines ahead of
    /// the header row.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        let sections = [
            ("meta", metadata()),
            ("param", self.params.clone()),
            ("summary", self.summary.clone()),
        ];
        for (prefix, map) in sections {
            for (k, v) in map {
                out.push_str(&format!("# {prefix}.{k}: {}\n", scalar_text(&v)));
            }
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

fn metadata() -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert(
        "branch_convention".into(),
        Value::String(BRANCH_CONVENTION.into()),
    );
    m.insert(
        "tool_version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    m.insert(
        "gravloop_seed".into(),
        Value::String("reserved, unused".into()),
    );
    let tolerances: Map<String, Value> = [
        ("unit_modulus", tolerance::UNIT_MODULUS),
        ("split_normalization", tolerance::SPLIT_NORMALIZATION),
        ("pole", tolerance::POLE),
        ("marginal", tolerance::MARGINAL),
        ("grid_uniformity", tolerance::GRID_UNIFORMITY),
        ("register_norm", tolerance::REGISTER_NORM),
        ("equal_duration", tolerance::EQUAL_DURATION),
        ("verdict_threshold", verdict_threshold::<f64>()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), num(v)))
    .collect();
    m.insert("tolerances".into(), Value::Object(tolerances));
    m
}
