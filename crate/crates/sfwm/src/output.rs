//! Result files: CSV for gridded data, JSON for summaries. Floats are written
//! in shortest round-trip form so re-reading them gives the same bits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

/// Named files produced by one command, in the order they were created.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                write_atomic(&path, bytes)?;
                Ok(path)
            })
            .collect()
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Columns of equal length under a header row.
pub fn columns_csv(header: &[&str], cols: &[&[f64]]) -> Result<Vec<u8>> {
    let rows = cols.first().map_or(0, |c| c.len());
    if cols.iter().any(|c| c.len() != rows) || cols.len() != header.len() {
        return Err(CliError::Usage("ragged CSV columns".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in 0..rows {
        w.write_record(cols.iter().map(|c| num(c[r])))
            .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

/// Matrix with the column axis in the header row and the row axis in the
/// first column; `corner` labels both (e.g. `theta_rad\phi_rad`).
pub fn matrix_csv(corner: &str, rows: &[f64], cols: &[f64], data: &[Vec<f64>]) -> Result<Vec<u8>> {
    if data.len() != rows.len() || data.iter().any(|r| r.len() != cols.len()) {
        return Err(CliError::Usage(
            "matrix shape does not match its axes".into(),
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![corner.to_string()];
    header.extend(cols.iter().map(|c| num(*c)));
    w.write_record(&header).map_err(csv_err)?;
    for (y, row) in rows.iter().zip(data) {
        let mut rec = vec![num(*y)];
        rec.extend(row.iter().map(|v| num(*v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::io("<csv buffer>", std::io::Error::other(e))
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::io("<json buffer>", std::io::Error::other(e)))?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn matrix_layout() {
        let b = matrix_csv("y\\x", &[0.0, 1.0], &[2.0], &[vec![3.0], vec![4.0]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "y\\x,2\n0,3\n1,4\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
