//! CSV result tables.
//!
//! Floats are written with `{:.16e}`, which round-trips every finite `f64`,
//! so a table is a pure function of the values it holds.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Result, SpcaError};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Field {
    pub fn render(&self) -> String {
        match self {
            Field::Text(s) => s.clone(),
            Field::Int(v) => v.to_string(),
            Field::Float(v) => format!("{v:.16e}"),
        }
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

/// Joins counts with `;`, e.g. nonzeros per component.
pub fn join_counts(values: &[usize]) -> Field {
    Field::Text(values.iter().map(usize::to_string).collect::<Vec<_>>().join(";"))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Header plus rows, LF line endings.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let csv_err = |e: csv::Error| SpcaError::Data(format!("CSV encoding failed: {e}"));
        out.write_record(&self.header).map_err(csv_err)?;
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != self.header.len() {
                return Err(SpcaError::Data(format!(
                    "row {r} has {} fields, header has {}",
                    row.len(),
                    self.header.len()
                )));
            }
            out.write_record(row.iter().map(Field::render)).map_err(csv_err)?;
        }
        let bytes = out.into_inner().map_err(|e| SpcaError::Data(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("fields are UTF-8"))
    }
}

/// Writes `table` to `path`. An empty table is an error and leaves no file.
pub fn emit_report(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if table.rows.is_empty() {
        return Err(SpcaError::Data(format!(
            "no results to write to {}",
            path.display()
        )));
    }
    let text = table.to_csv_string()?;
    let mut file = File::create(path).map_err(|e| SpcaError::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| SpcaError::io(path, e))
}
