//! Tabular artifacts: CSV or JSON with deterministic ordering.
//!
//! Rows are sorted by their first column (the row id), columns keep their
//! declared order and numbers are rounded to 12 significant digits. Both
//! formats print numbers through the same formatter, so a value reads
//! identically in either file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::param("format", format!("`{s}`: expected csv or json"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
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

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form of a number shared by both formats; non-finite values become
/// `inf`, `-inf` or `nan`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // shortest round-trip representation
        serde_json::Number::from_f64(round_sig(x)).map_or_else(|| "nan".into(), |n| n.to_string())
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Num(x) if x.is_finite() => Value::Number(serde_json::Number::from_f64(round_sig(*x)).expect("finite")),
            Cell::Num(x) => Value::String(format_number(*x)),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }

    fn sort_key(&self) -> String {
        self.csv_text()
    }
}

/// Homogeneous rows under fixed columns, sorted by a key column (the row id).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    key: usize,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Table keyed by its first column.
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), key: 0, rows: Vec::new() }
    }

    /// Table keyed by the column named `key`.
    pub fn keyed<S: Into<String>>(columns: impl IntoIterator<Item = S>, key: &str) -> Result<Self> {
        let mut t = Table::new(columns);
        t.key = t
            .columns
            .iter()
            .position(|c| c == key)
            .ok_or_else(|| Error::data(format!("no key column `{key}`")))?;
        Ok(t)
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::data(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Appends every row of `other`, which must have the same columns.
    pub fn extend(&mut self, other: Table) -> Result<()> {
        if other.columns != self.columns || other.key != self.key {
            return Err(Error::data("cannot merge tables with different columns"));
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    fn sorted_rows(&self) -> Vec<&Vec<Cell>> {
        let mut rows: Vec<&Vec<Cell>> = self.rows.iter().collect();
        rows.sort_by_cached_key(|r| r[self.key].sort_key());
        rows
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in self.sorted_rows() {
                    w.write_record(row.iter().map(Cell::csv_text))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::data(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::data(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .sorted_rows()
                    .into_iter()
                    .map(|r| serde_json::Value::Array(r.iter().map(Cell::json_value).collect()))
                    .collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }
}

/// Writes `table` to `path`. An unwritable path is a data error naming it.
pub fn emit_report(table: &Table, format: Format, path: &Path) -> Result<()> {
    let text = table.render(format)?;
    std::fs::write(path, text).map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["row_id", "value", "note"]);
        t.push(vec!["002".into(), 1.0f64.into(), "b".into()]).unwrap();
        t.push(vec!["001".into(), (2.0f64 / 3.0).into(), Cell::Missing]).unwrap();
        t.push(vec!["003".into(), f64::INFINITY.into(), "c".into()]).unwrap();
        t
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(format_number(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_number(1.0), "1.0");
        assert_eq!(format_number(-1.234567890123456e-20), "-1.23456789012e-20");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_sorted_by_row_id() {
        let csv = sample().render(Format::Csv).unwrap();
        assert_eq!(csv, "row_id,value,note\n001,0.666666666667,\n002,1.0,b\n003,inf,c\n");
    }

    #[test]
    fn keyed_by_second_column() {
        let mut t = Table::keyed(["experiment", "row_id"], "row_id").unwrap();
        t.push(vec!["z".into(), "2".into()]).unwrap();
        t.push(vec!["z".into(), "1".into()]).unwrap();
        assert_eq!(t.render(Format::Csv).unwrap(), "experiment,row_id\nz,1\nz,2\n");
        assert!(Table::keyed(["a"], "b").is_err());
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["row_id", "x"]);
        assert_eq!(t.render(Format::Csv).unwrap(), "row_id,x\n");
    }

    #[test]
    fn json_and_csv_agree() {
        let t = sample();
        let json: serde_json::Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        let csv = t.render(Format::Csv).unwrap();
        let csv_rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        for (jr, cr) in json["rows"].as_array().unwrap().iter().zip(&csv_rows) {
            match &jr[1] {
                serde_json::Value::Number(n) => assert_eq!(n.to_string(), cr[1]),
                serde_json::Value::String(s) => assert_eq!(s, cr[1]),
                v => panic!("{v}"),
            }
        }
    }

    #[test]
    fn ragged_rows_and_bad_paths() {
        let mut t = Table::new(["a", "b"]);
        assert!(t.push(vec![Cell::Missing]).is_err());
        let err = emit_report(&t, Format::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err:?}");
    }

    #[test]
    fn identical_renders() {
        assert_eq!(sample().render(Format::Json).unwrap(), sample().render(Format::Json).unwrap());
    }
}
