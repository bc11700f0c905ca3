//! Run manifests: what was run, with which seed, and digests of every file
//! written.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::io::table::Column;

#[derive(Clone, Debug, Serialize)]
pub struct OutputEntry {
    /// Path relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<Column>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputEntry>,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        master_seed: u64,
        started_unix: u64,
    ) -> Self {
        RunManifest {
            tool: "innodict".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            master_seed,
            started_unix,
            finished_unix: started_unix,
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, name: &str, contents: &[u8], columns: Option<Vec<Column>>) {
        self.outputs.push(OutputEntry {
            path: name.into(),
            sha256: sha256_hex(contents),
            bytes: contents.len() as u64,
            columns,
        });
    }

    pub fn write(&mut self, path: &Path) -> Result<()> {
        self.finished_unix = unix_now();
        let mut json = serde_json::to_vec_pretty(self)?;
        json.push(b'\n');
        std::fs::write(path, json)?;
        Ok(())
    }
}
