use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunTermination {
    Completed,
    BlowUp(f64),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: String,
    pub code_version: String,
    /// Seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub files: Vec<FileEntry>,
    pub termination: RunTermination,
}

pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn code_version() -> String {
    format!("kkwave {}", env!("CARGO_PKG_VERSION"))
}

/// Checksums of `names`, relative to `dir`.
pub fn file_entries(dir: &Path, names: &[String]) -> CliResult<Vec<FileEntry>> {
    names
        .iter()
        .map(|name| {
            let path = dir.join(name);
            let bytes = std::fs::read(&path).map_err(CliError::io(&path))?;
            Ok(FileEntry { path: name.clone(), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) })
        })
        .collect()
}
