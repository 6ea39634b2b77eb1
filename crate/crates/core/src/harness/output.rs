use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Git-style content hash: SHA-256 over `blob <len>\0<bytes>`.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

/// Writes plot-ready CSV. Only deterministic columns belong here.
pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Metadata written next to a CSV table.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar<M: Serialize> {
    pub kind: &'static str,
    pub table: String,
    pub table_hash: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: Option<usize>,
    pub wall_time_s: f64,
    pub meta: M,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_sidecar<M: Serialize>(csv: &Path, sidecar: &Sidecar<M>) -> Result<PathBuf> {
    let path = sidecar_path(csv);
    std::fs::write(&path, serde_json::to_string_pretty(sidecar)? + "\n")?;
    Ok(path)
}
