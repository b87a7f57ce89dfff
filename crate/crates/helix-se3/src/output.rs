//! CSV result tables with `#`-prefixed provenance headers.

use crate::Error;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
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

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// 17 significant digits, enough to read back the same `f64`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&format_number(*x)),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable { header: vec![], columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    /// Adds header lines; multi-line text becomes several lines.
    pub fn note(&mut self, text: &str) {
        self.header.extend(text.lines().map(str::to_string));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the column count");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    /// Reads a table written by [`render`](Self::render); every body cell must be numeric.
    pub fn parse_numeric(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), Error> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Config("empty table".into()))?
            .split(',')
            .map(|c| c.trim().to_string())
            .collect();
        let mut rows = vec![];
        for (i, l) in lines.enumerate() {
            let row = l
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("table row {} is not numeric", i + 1)))?;
            if row.len() != columns.len() {
                return Err(Error::Config(format!("table row {} has {} cells", i + 1, row.len())));
            }
            rows.push(row);
        }
        Ok((columns, rows))
    }
}
