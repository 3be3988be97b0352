use std::io::{self, Write};

use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[value(name = "csv")]
    CsvHeadered,
    #[value(name = "json")]
    JsonRecords,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(x: Option<T>) -> Self {
        x.map_or(Value::Missing, Into::into)
    }
}

/// Homogeneous rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row does not match header");
        self.rows.push(row);
    }
}

/// Fixed notation with 12 decimals in `[1e-3, 1e4)`, otherwise 12 significant
/// digits in scientific notation. Never depends on locale.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 {
        "0.000000000000".into()
    } else if (1e-3..1e4).contains(&a) {
        format!("{x:.12}")
    } else {
        format!("{x:.11e}")
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Num(x) => format_number(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => s.clone(),
        Value::Missing => String::new(),
    }
}

fn json_value(v: &Value) -> Json {
    match v {
        Value::Num(x) => Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Value::Int(i) => Json::from(*i),
        Value::Bool(b) => Json::Bool(*b),
        Value::Text(s) => Json::String(s.clone()),
        Value::Missing => Json::Null,
    }
}

pub fn emit(table: &Table, format: OutputFormat, sink: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::CsvHeadered => {
            let mut w = csv::WriterBuilder::new().from_writer(&mut *sink);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(csv_cell))?;
            }
            w.flush()?;
        }
        OutputFormat::JsonRecords => {
            let records: Vec<Json> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Json> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), json_value(v)))
                        .collect();
                    Json::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut *sink, &records)?;
            writeln!(sink)?;
        }
    }
    sink.flush()
}
