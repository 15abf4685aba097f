use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Rectangular numeric table with `#` comment lines written above the
/// header.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Resolved configuration, version and grid information.
    pub provenance: Vec<String>,
    /// Analysis results (extrema, fits, knee).
    pub annotations: Vec<String>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
            provenance: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                actual: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Numbers use Rust's shortest round-trip scientific notation, so equal
    /// tables serialize to identical bytes.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        for line in self.provenance.iter().chain(&self.annotations) {
            for part in line.lines() {
                s.push_str("# ");
                s.push_str(part);
                s.push('\n');
            }
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(table.to_csv_string().as_bytes())?;
    Ok(())
}
