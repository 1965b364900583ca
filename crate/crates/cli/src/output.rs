//! Report files: one `report.json` per run plus CSV grids.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use critrad_core::Domain;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Round-trip float formatting: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug)]
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    /// One row per cell in row-major order: index, coordinates, then the
    /// named columns.
    pub fn grid(&mut self, name: &str, domain: &Domain, columns: &[(&str, &[f64])]) -> Result<(), CliError> {
        let mut header = vec!["cell".to_string()];
        header.extend((1..=domain.dim()).map(|k| format!("x{k}")));
        header.extend(columns.iter().map(|c| c.0.to_string()));
        let rows = (0..domain.len()).map(|i| {
            let c = domain.center(i);
            let mut row = vec![i.to_string()];
            row.extend(c[..domain.dim()].iter().map(|&x| fmt_f64(x)));
            row.extend(columns.iter().map(|col| fmt_f64(col.1[i])));
            row
        });
        self.table(name, &header, rows)
    }

    pub fn table<I>(&mut self, name: &str, header: &[String], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let file = format!("{name}.csv");
        let mut w = csv::Writer::from_path(self.dir.join(&file))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(file);
        Ok(())
    }

    pub fn report(self, command: &str, summary: Value, provenance: Value) -> Result<PathBuf, CliError> {
        let path = self.dir.join("report.json");
        let doc = json!({
            "command": command,
            "summary": summary,
            "files": self.files,
            "provenance": provenance,
        });
        fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(path)
    }
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
