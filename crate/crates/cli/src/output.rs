//! Tabular and JSON rendering.

use std::io::Write;

use linopt::circuits::CircuitResult;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ..= 1e12`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s.to_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn json(&self) -> Value {
        let rows = self.rows.iter().map(|row| {
            let obj: Map<String, Value> =
                self.header.iter().zip(row).map(|(k, v)| ((*k).to_owned(), v.json())).collect();
            Value::Object(obj)
        });
        Value::Array(rows.collect())
    }
}

/// What a subcommand emits: a flat table, or a circuit report with its own
/// JSON shape.
pub enum Report {
    Table(Table),
    Circuit(CircuitReport),
}

pub struct CircuitReport {
    pub result: CircuitResult,
    /// Extra headline values, e.g. fidelity to the target state.
    pub summary: Vec<(&'static str, f64)>,
}

impl CircuitReport {
    fn table(&self) -> Table {
        let mut t = Table::new(vec!["section", "key", "value", "imag"]);
        let res = &self.result;
        t.push(vec!["summary".into(), "success_prob".into(), res.success_prob.into(), Cell::Empty]);
        for (k, v) in &self.summary {
            t.push(vec!["summary".into(), (*k).into(), (*v).into(), Cell::Empty]);
        }
        for step in &res.steps {
            t.push(vec!["step".into(), step.label.clone().into(), step.probability.into(), Cell::Empty]);
        }
        let modes: Vec<String> = res.output.register().modes().iter().map(|m| m.to_string()).collect();
        t.push(vec!["register".into(), "modes".into(), modes.join(" ").into(), Cell::Empty]);
        for (k, b) in res.output.branches().iter().enumerate() {
            t.push(vec!["branch".into(), Cell::Int(k as i64), b.weight.into(), Cell::Empty]);
            for (occ, a) in b.state.amplitudes() {
                let key = format!("{k}:{}", occupation(occ.counts()));
                t.push(vec!["amplitude".into(), key.into(), a.re.into(), a.im.into()]);
            }
        }
        t
    }

    fn json(&self) -> Value {
        let res = &self.result;
        let mut obj = Map::new();
        obj.insert("success_prob".into(), json!(res.success_prob));
        for (k, v) in &self.summary {
            obj.insert((*k).into(), json!(v));
        }
        let steps: Vec<Value> =
            res.steps.iter().map(|s| json!({"label": s.label, "probability": s.probability})).collect();
        obj.insert("steps".into(), Value::Array(steps));
        let modes: Vec<String> = res.output.register().modes().iter().map(|m| m.to_string()).collect();
        obj.insert("register".into(), json!(modes));
        let branches: Vec<Value> = res
            .output
            .branches()
            .iter()
            .map(|b| {
                let amps: Vec<Value> = b
                    .state
                    .amplitudes()
                    .map(|(occ, a)| json!({"occupation": occ.counts(), "re": a.re, "im": a.im}))
                    .collect();
                json!({"weight": b.weight, "amplitudes": amps})
            })
            .collect();
        obj.insert("branches".into(), Value::Array(branches));
        Value::Object(obj)
    }
}

fn occupation(counts: &[u8]) -> String {
    counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let table = match self {
                    Report::Table(t) => t.clone(),
                    Report::Circuit(c) => c.table(),
                };
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&table.header)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()
            }
            Format::Json => {
                let value = match self {
                    Report::Table(t) => t.json(),
                    Report::Circuit(c) => c.json(),
                };
                serde_json::to_writer_pretty(&mut *out, &value)?;
                writeln!(out)
            }
        }
    }
}
