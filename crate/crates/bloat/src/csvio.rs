//! Header-checked CSV reading.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// A CSV table with required columns located by name.
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    columns: BTreeMap<String, usize>,
    pub rows: Vec<csv::StringRecord>,
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(Error::csv(path))
}

fn require(path: &Path, headers: &[String], required: &[&str]) -> Result<()> {
    match required.iter().find(|c| !headers.iter().any(|h| h == *c)) {
        Some(c) => Err(Error::Schema { path: path.into(), column: (*c).into() }),
        None => Ok(()),
    }
}

/// Reads only the header row and checks the required columns.
pub fn check_header(path: &Path, required: &[&str]) -> Result<()> {
    let headers: Vec<String> = reader(path)?.headers().map_err(Error::csv(path))?.iter().map(str::to_string).collect();
    require(path, &headers, required)
}

impl Table {
    pub fn read(path: &Path, required: &[&str]) -> Result<Self> {
        let mut rdr = reader(path)?;
        let headers: Vec<String> = rdr.headers().map_err(Error::csv(path))?.iter().map(str::to_string).collect();
        require(path, &headers, required)?;
        let columns: BTreeMap<String, usize> = headers.iter().enumerate().map(|(i, h)| (h.clone(), i)).collect();
        let rows = rdr.records().collect::<Result<Vec<_>, _>>().map_err(Error::csv(path))?;
        Ok(Table { path: path.into(), headers, columns, rows })
    }

    pub fn has(&self, column: &str) -> bool {
        self.columns.contains_key(column)
    }

    pub fn get<'r>(&self, row: &'r csv::StringRecord, column: &str) -> &'r str {
        row.get(self.columns[column]).unwrap_or("")
    }

    /// Line number of data row `i` (the header is line 1).
    pub fn line(&self, i: usize) -> usize {
        i + 2
    }

    pub fn err(&self, i: usize, message: impl Into<String>) -> Error {
        Error::Parse { path: self.path.clone(), line: self.line(i), message: message.into() }
    }

    pub fn f64(&self, i: usize, column: &str) -> Result<f64> {
        let cell = self.get(&self.rows[i], column);
        cell.parse().map_err(|_| self.err(i, format!("{column}: not a number: {cell:?}")))
    }

    pub fn opt_f64(&self, i: usize, column: &str) -> Result<Option<f64>> {
        crate::io::parse_opt(self.get(&self.rows[i], column)).map_err(|m| self.err(i, format!("{column}: {m}")))
    }
}
