//! Result tables and their CSV / JSON encodings.

use serde_json::{Map, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// RFC 4180 with `\n` line endings; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column name; empty cells become `null`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.clone(), cell_json(cell));
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("tables serialize");
        s.push('\n');
        s
    }

    /// Reads back [`Table::to_csv`] output. Unquoted fields that parse as
    /// integers or floats become numbers; quoted fields stay text.
    pub fn parse_csv(input: &str) -> Result<Self, String> {
        let mut records = split_records(input)?.into_iter();
        let header = records.next().ok_or("missing header row")?;
        let columns: Vec<String> = header.into_iter().map(|(s, _)| s).collect();
        let mut rows = Vec::new();
        for (i, rec) in records.enumerate() {
            if rec.len() != columns.len() {
                return Err(format!("row {} has {} fields, expected {}", i + 1, rec.len(), columns.len()));
            }
            rows.push(rec.into_iter().map(|(s, quoted)| parse_cell(s, quoted)).collect());
        }
        Ok(Self { columns, rows })
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        // Text that would read back as another kind of cell is quoted.
        Cell::Text(s) if !matches!(parse_cell(s.clone(), false), Cell::Text(_)) => {
            format!("\"{}\"", s)
        }
        Cell::Text(s) => quote(s),
        Cell::Empty => String::new(),
    }
}

/// 17 significant digits in scientific form.
pub fn format_float(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{x:.16e}").expect("string write");
    s
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::from(*b),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Empty => Value::Null,
    }
}

fn parse_cell(s: String, quoted: bool) -> Cell {
    if quoted {
        return Cell::Text(s);
    }
    if s.is_empty() {
        Cell::Empty
    } else if let Ok(b) = s.parse::<bool>() {
        Cell::Bool(b)
    } else if let Ok(i) = s.parse::<i64>() {
        Cell::Int(i)
    } else if let Ok(x) = s.parse::<f64>() {
        Cell::Num(x)
    } else {
        Cell::Text(s)
    }
}

/// Splits CSV text into records of `(field, was_quoted)`.
fn split_records(input: &str) -> Result<Vec<Vec<(String, bool)>>, String> {
    let mut records = Vec::new();
    let mut record = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut chars = input.chars().peekable();
    let mut at_field_start = true;
    while let Some(ch) = chars.next() {
        if at_field_start && ch == '"' {
            quoted = true;
            at_field_start = false;
            loop {
                match chars.next() {
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        field.push('"');
                    }
                    Some('"') => break,
                    Some(c) => field.push(c),
                    None => return Err("unterminated quoted field".into()),
                }
            }
            continue;
        }
        at_field_start = false;
        match ch {
            ',' => {
                record.push((std::mem::take(&mut field), quoted));
                quoted = false;
                at_field_start = true;
            }
            '\n' => {
                record.push((std::mem::take(&mut field), quoted));
                records.push(std::mem::take(&mut record));
                quoted = false;
                at_field_start = true;
            }
            '\r' => {}
            c => field.push(c),
        }
    }
    if !at_field_start || !record.is_empty() {
        record.push((field, quoted));
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "label", "E", "note"]);
        t.push(vec![Cell::Int(0), "a,b".into(), Cell::Num(-0.5), Cell::Empty]);
        t.push(vec![Cell::Int(3), "say \"hi\"".into(), Cell::Num(1.0 / 3.0), "x".into()]);
        t.push(vec![Cell::Int(-1), "true".into(), Cell::Num(0.0), Cell::Bool(false)]);
        t
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let csv = t.to_csv();
        assert!(csv.starts_with("n,label,E,note\n0,\"a,b\",-5.0000000000000000e-1,\n"));
        assert_eq!(Table::parse_csv(&csv).unwrap(), t);
    }

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_rows_are_objects() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v[0]["label"], "a,b");
        assert_eq!(v[0]["note"], Value::Null);
        assert_eq!(v[1]["E"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Table::parse_csv("a,b\n1\n").is_err());
    }
}
