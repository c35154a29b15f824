//! Result tables and their CSV / JSON encodings.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::config::OutputFormat;

/// Significant digits of every floating-point field.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Optional plot hint: column names of the abscissa, the ordinate and the
/// series key.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotHint {
    pub x: &'static str,
    pub y: &'static str,
    pub group: Option<&'static str>,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<PlotHint>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn with_plot(mut self, x: &'static str, y: &'static str, group: Option<&'static str>, log_y: bool) -> Self {
        self.plot = Some(PlotHint { x, y, group, log_y });
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

/// `printf("%.12g")`: shortest of fixed and scientific notation with
/// trailing zeros removed, independent of locale.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_g(*v),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

pub fn to_csv(table: &Table) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Array of row objects. Numbers go through the same 12-digit rounding as
/// the CSV; non-finite values become the strings `inf`, `-inf`, `nan`.
pub fn to_json(table: &Table) -> Vec<u8> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, c) in table.columns.iter().zip(row) {
                let v = match c {
                    Cell::Int(v) => Value::from(*v),
                    Cell::Num(v) if v.is_finite() => Value::from(format_g(*v).parse::<f64>().expect("numeric")),
                    Cell::Num(v) => Value::from(format_g(*v)),
                    Cell::Text(s) => Value::from(s.clone()),
                    Cell::Bool(b) => Value::from(*b),
                };
                obj.insert((*name).to_string(), v);
            }
            Value::Object(obj)
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&Value::Array(rows)).expect("json encodes");
    out.push(b'\n');
    out
}

pub fn encode(table: &Table, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table),
    }
}

pub fn file_name(table: &Table, format: OutputFormat) -> String {
    format!("{}.{}", table.name, format.extension())
}

/// A gnuplot script that draws `table` from its CSV file, one series per
/// distinct value of the group column.
pub fn gnuplot_script(table: &Table, csv_file: &str) -> Option<String> {
    let hint = table.plot.as_ref()?;
    let x = table.column(hint.x)? + 1;
    let y = table.column(hint.y)? + 1;
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{}'", hint.x);
    let _ = writeln!(s, "set ylabel '{}'", hint.y);
    if hint.log_y {
        let _ = writeln!(s, "set logscale y");
    }
    match hint.group.and_then(|g| table.column(g)) {
        Some(g) => {
            let mut groups: Vec<String> = Vec::new();
            for row in &table.rows {
                let key = cell_text(&row[g]);
                if !groups.contains(&key) {
                    groups.push(key);
                }
            }
            let series: Vec<String> = groups
                .iter()
                .map(|k| {
                    format!(
                        "'{csv_file}' using (strcol({}) eq '{k}' ? ${x} : 1/0):{y} with linespoints title '{k}'",
                        g + 1
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
        }
        None => {
            let _ = writeln!(s, "plot '{csv_file}' using {x}:{y} with linespoints");
        }
    }
    Some(s)
}

/// Writes `bytes` to `dir/name` and returns the path.
pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> io::Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, bytes)?;
    Ok(path)
}
