//! Deterministic CSV output and minimal CSV reading for fit inputs.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Rectangular table of pre-formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_values(&mut self, values: &[f64]) {
        self.rows.push(values.iter().map(|&v| fmt_value(v)).collect());
    }

    pub fn push_cells(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::Contract(format!(
                    "row {i} has {} cells, header has {}",
                    row.len(),
                    self.columns.len()
                )));
            }
        }
        Ok(())
    }
}

/// Canonical numeric format: 12 significant digits in scientific notation.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write a table: header row, one line per row, newline-terminated,
/// byte-deterministic for identical input.
pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    table.validate()?;
    let mut out = String::new();
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Read a CSV of all-numeric columns written by this tool (or any simple
/// comma-separated file with a header row).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| {
            Error::Config(format!("{} line {}: {e}", path.display(), k + 2))
        })?;
        if row.len() != header.len() {
            return Err(Error::Config(format!(
                "{} line {}: {} fields, expected {}",
                path.display(),
                k + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
