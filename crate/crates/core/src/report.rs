//! CSV tables (RFC 4180, header row first).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A header and string rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_rows<S: AsRef<str>>(header: &[S], rows: Vec<Vec<String>>) -> Self {
        Table {
            rows,
            ..Table::new(header)
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Column `k` parsed as numbers; `None` if any cell is not a number.
    pub fn numeric_column(&self, k: usize) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.get(k).and_then(|c| c.trim().parse::<f64>().ok()))
            .collect()
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let bytes = (|| -> std::result::Result<Vec<u8>, csv::Error> {
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.into_inner().map_err(|e| e.into_error().into())
        })()
        .expect("writing CSV to memory");
        String::from_utf8(bytes).expect("CSV of UTF-8 cells")
    }

    pub fn parse(text: &str, path: &Path) -> Result<Table> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(csv_err)?;
        Ok(Table { header, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }

    pub fn read(path: &Path) -> Result<Table> {
        Table::parse(&read_text(path)?, path)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_and_round_trip() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["plain".into(), num(0.1)]);
        t.push(vec!["with, comma".into(), num(-2.5e-9)]);
        t.push(vec!["with \"quote\"".into(), num(4.0)]);
        let text = t.to_csv_string();
        assert!(text.starts_with("name,value\n"));
        assert!(text.contains("\"with, comma\""));
        assert!(text.contains("\"with \"\"quote\"\"\""));
        let back = Table::parse(&text, Path::new("mem")).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.numeric_column(1).unwrap(), vec![0.1, -2.5e-9, 4.0]);
        assert!(back.numeric_column(0).is_none());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = Table::read(Path::new("/nonexistent/dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.csv"));
        let ragged = Table::parse("a,b\n1\n", Path::new("r.csv")).unwrap_err();
        assert!(matches!(ragged, Error::Csv { .. }));
    }
}
