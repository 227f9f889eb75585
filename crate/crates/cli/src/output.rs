use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::args::Cli;

/// Provenance record written as `manifest.json` next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Cli,
    pub version: String,
    /// None of the commands draw random numbers; kept for provenance.
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

pub const MANIFEST: &str = "manifest.json";

/// Shortest decimal that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn complex_cells(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn csv_bytes<I, R>(header: &[String], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Output directory that remembers what it wrote.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn finish(self, cli: &Cli, started: String, overrides: &[(String, f64)]) -> Result<()> {
        let manifest = RunManifest {
            command: cli.command.name().to_string(),
            parameters: cli.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            started,
            finished: now(),
            outputs: self.files,
            tolerance_overrides: overrides.iter().cloned().collect(),
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        let path = self.root.join(MANIFEST);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339()
}
