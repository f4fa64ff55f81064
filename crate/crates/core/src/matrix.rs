//! Square matrices keyed by graph id, with the CSV export format shared by
//! pairwise GED matrices and kernel Gram matrices.
//!
//! Layout on disk: a header row `graph_id,<id 1>,<id 2>,...` followed by one
//! row per graph, each prefixed with its id. Row and column order is the
//! dataset file order.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IdMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl IdMatrix {
    pub fn zeros(ids: Vec<String>) -> Self {
        let n = ids.len();
        IdMatrix {
            ids,
            values: vec![0.0; n * n],
        }
    }

    pub fn from_values(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != ids.len() * ids.len() {
            return Err(Error::Shape(format!(
                "expected {} values for a {}x{} matrix, found {}",
                ids.len() * ids.len(),
                ids.len(),
                ids.len(),
                values.len()
            )));
        }
        Ok(IdMatrix { ids, values })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.ids.len() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.ids.len() + col] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = String::from("graph_id");
        for id in &self.ids {
            text.push(',');
            text.push_str(id);
        }
        text.push('\n');
        for (r, id) in self.ids.iter().enumerate() {
            text.push_str(id);
            for c in 0..self.ids.len() {
                text.push(',');
                text.push_str(&format_value(self.get(r, c)));
            }
            text.push('\n');
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        file.write_all(text.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(file);
        let ids: Vec<String> = {
            let headers = reader.headers().map_err(|e| Error::Parse {
                file: path.display().to_string(),
                line: 1,
                message: e.to_string(),
            })?;
            headers.iter().skip(1).map(|s| s.to_string()).collect()
        };
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        let mut rows_seen = 0usize;
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::Parse {
                file: path.display().to_string(),
                line,
                message: e.to_string(),
            })?;
            if record.len() != n + 1 {
                return Err(Error::Shape(format!(
                    "{}:{line}: expected {} fields, found {}",
                    path.display(),
                    n + 1,
                    record.len()
                )));
            }
            if i >= n {
                return Err(Error::Shape(format!(
                    "{}: more rows than header columns ({n})",
                    path.display()
                )));
            }
            if record[0] != ids[i][..] {
                return Err(Error::Consistency(format!(
                    "{}:{line}: row id '{}' does not match column id '{}'",
                    path.display(),
                    &record[0],
                    ids[i]
                )));
            }
            for c in 0..n {
                values[i * n + c] = record[c + 1].parse().map_err(|e| Error::Parse {
                    file: path.display().to_string(),
                    line,
                    message: format!("bad number '{}': {e}", &record[c + 1]),
                })?;
            }
            rows_seen += 1;
        }
        if rows_seen != n {
            return Err(Error::Shape(format!(
                "{}: expected {n} rows, found {rows_seen}",
                path.display()
            )));
        }
        IdMatrix::from_values(ids, values)
    }
}

/// Shortest round-trip decimal form (serde_json's float formatting), so
/// identical runs produce byte-identical files.
fn format_value(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "0".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_csv() {
        let mut m = IdMatrix::zeros(vec!["a".into(), "b".into()]);
        m.set(0, 1, 1.5);
        m.set(1, 0, 1.5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        m.write_csv(&path).unwrap();
        let back = IdMatrix::read_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "graph_id,a,b\na,0,1\nb,0\n").unwrap();
        assert_eq!(IdMatrix::read_csv(&path).unwrap_err().category(), "shape");
    }

    #[test]
    fn asymmetry_probe() {
        let mut m = IdMatrix::zeros(vec!["a".into(), "b".into()]);
        m.set(0, 1, 2.0);
        m.set(1, 0, 2.5);
        assert!((m.max_abs_asymmetry() - 0.5).abs() < 1e-12);
    }
}
