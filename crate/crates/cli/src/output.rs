//! File formats.
//!
//! - CSV profiles: `# key = value` metadata lines, a header row, then data.
//! - Field files: a header line `n_x n_y x_min x_max y_min y_max t`, then one
//!   line of values per grid row, bottom row first.
//! - Metrics: `key = value` lines.
//!
//! Floats are written in Rust's shortest round-trip form, so files are
//! byte-for-byte reproducible and parse back to the same values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rarz::solver2d::Snapshot2D;

use crate::error::CliError;

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Renders columns of equal length as CSV.
pub fn csv_string(metadata: &[(String, String)], header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows), "ragged CSV columns");
    assert_eq!(header.len(), columns.len());
    let mut out = String::new();
    for (k, v) in metadata {
        writeln!(out, "# {k} = {v}").unwrap();
    }
    writeln!(out, "{}", header.join(",")).unwrap();
    for r in 0..rows {
        for (c, col) in columns.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{}", col[r]).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Csv {
    pub metadata: BTreeMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse_csv(text: &str) -> Result<Csv, String> {
    let mut csv = Csv::default();
    for (n, line) in text.lines().enumerate() {
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                csv.metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else if csv.header.is_empty() {
            csv.header = line.split(',').map(str::to_string).collect();
        } else {
            let row = line
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|e| format!("line {}: {e}", n + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != csv.header.len() {
                return Err(format!("line {}: expected {} values", n + 1, csv.header.len()));
            }
            csv.rows.push(row);
        }
    }
    Ok(csv)
}

pub fn field_string(snap: &Snapshot2D, field: &[f64]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {} {} {} {} {} {}",
        snap.nx, snap.ny, snap.x_range.0, snap.x_range.1, snap.y_range.0, snap.y_range.1, snap.time
    )
    .unwrap();
    for row in field.chunks(snap.nx) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

/// A field file read back into memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub time: f64,
    pub values: Vec<f64>,
}

pub fn parse_field(text: &str) -> Result<Field, String> {
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().ok_or("empty field file")?.split_whitespace().collect();
    if head.len() != 7 {
        return Err("field header needs seven entries".into());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
    let nx: usize = head[0].parse().map_err(|e| format!("n_x: {e}"))?;
    let ny: usize = head[1].parse().map_err(|e| format!("n_y: {e}"))?;
    let values = lines
        .flat_map(str::split_whitespace)
        .map(num)
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != nx * ny {
        return Err(format!("expected {} values, found {}", nx * ny, values.len()));
    }
    Ok(Field {
        nx,
        ny,
        x_range: (num(head[2])?, num(head[3])?),
        y_range: (num(head[4])?, num(head[5])?),
        time: num(head[6])?,
        values,
    })
}

/// Ordered `key = value` summary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metrics {
    entries: Vec<(String, String)>,
}

impl Metrics {
    pub fn new() -> Self {
        Metrics::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: Metrics) {
        self.entries.extend(other.entries);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

pub fn parse_metrics(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Collects the files an experiment writes, relative to one directory.
#[derive(Debug, Clone)]
pub struct OutputDir {
    pub root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        ensure_dir(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        write_file(&path, contents)?;
        self.written.push(path.clone());
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let meta = vec![("scheme".to_string(), "hybrid".to_string())];
        let text = csv_string(&meta, &["x", "rho"], &[&[0.1, 0.3], &[0.7, 1.0 / 3.0]]);
        let csv = parse_csv(&text).unwrap();
        assert_eq!(csv.metadata["scheme"], "hybrid");
        assert_eq!(csv.column("rho").unwrap(), vec![0.7, 1.0 / 3.0]);
    }

    #[test]
    fn metrics_parse() {
        let mut m = Metrics::new();
        m.push("l1_rho", 0.25);
        m.push("pattern", "S+J");
        let back = parse_metrics(&m.render()).unwrap();
        assert_eq!(back["l1_rho"], "0.25");
        assert_eq!(back["pattern"], "S+J");
        assert!(parse_metrics("nonsense").is_err());
    }
}
