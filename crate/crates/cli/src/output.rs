use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{CliError, Format};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Encodes rows as CSV (header from the field names) or a JSON array.
pub fn encode_table<R: Serialize>(rows: &[R], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
        Format::Json => encode_json(&rows),
    }
}

pub fn encode_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Written next to every set of outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: Value,
    pub seed: Option<u64>,
    /// Seconds since the Unix epoch. Not covered by `checksum`.
    pub started_at_unix: u64,
    pub outputs: Vec<OutputFile>,
    /// SHA-256 over the output files' `name:sha256` lines, in order.
    pub checksum: String,
}

/// Named output blobs collected before anything touches the disk.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }

    pub fn manifest(&self, subcommand: &str, config: Value, seed: Option<u64>) -> RunManifest {
        let outputs: Vec<OutputFile> = self
            .files
            .iter()
            .map(|(file, bytes)| OutputFile {
                file: file.clone(),
                sha256: hex::encode(Sha256::digest(bytes)),
            })
            .collect();
        let mut total = Sha256::new();
        for o in &outputs {
            total.update(format!("{}:{}\n", o.file, o.sha256).as_bytes());
        }
        RunManifest {
            tool: "qclock".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            config,
            seed,
            started_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs,
            checksum: hex::encode(total.finalize()),
        }
    }

    /// Writes every file plus `manifest.json` into `dir`, creating it if needed.
    pub fn write_all(&self, dir: &Path, manifest: &RunManifest) -> Result<Vec<PathBuf>, CliError> {
        let io = |e: std::io::Error, p: &Path| CliError::Usage(format!("{}: {e}", p.display()));
        fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| io(e, &path))?;
            written.push(path);
        }
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, encode_json(manifest)?).map_err(|e| io(e, &path))?;
        written.push(path);
        Ok(written)
    }
}
