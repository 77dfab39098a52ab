//! Deterministic CSV output: fixed column order, '.' decimal separator,
//! floats in scientific notation with 12 significant digits.

use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// 12 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{:.11e}", x)
}

pub fn fmt_int(x: u64) -> String {
    x.to_string()
}

#[derive(Debug)]
pub struct CsvWriter {
    n_cols: usize,
    buf: String,
}

impl CsvWriter {
    pub fn new(columns: &[&str]) -> Self {
        let mut buf = columns.join(",");
        buf.push('\n');
        Self {
            n_cols: columns.len(),
            buf,
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.n_cols, "row width mismatch");
        for cell in cells {
            assert!(
                !cell.contains(',') && !cell.contains('\n'),
                "cell needs no quoting by construction"
            );
        }
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.buf).map_err(|e| CliError::io(path, e))
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

/// Lossless reader for the files produced by `CsvWriter`.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let cells: Vec<String> = line.split(',').map(str::to_string).collect();
        if cells.len() != header.len() {
            return Err(CliError::Config(format!(
                "{}: row width {} != header width {}",
                path.display(),
                cells.len(),
                header.len()
            )));
        }
        rows.push(cells);
    }
    Ok((header, rows))
}

/// Column index lookup helper for tests and downstream parsing.
pub fn column(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_float(0.0001848), "1.84800000000e-4");
        assert_eq!(fmt_float(-1.0), "-1.00000000000e0");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut w = CsvWriter::new(&["a", "b"]);
        w.row(&["x".into(), fmt_float(1.5)]);
        w.write(&path).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, vec!["a", "b"]);
        assert_eq!(rows, vec![vec!["x".to_string(), "1.50000000000e0".into()]]);
        assert_eq!(column(&header, "b"), Some(1));
    }
}
