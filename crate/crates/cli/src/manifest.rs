//! `manifest.json`: provenance of one run.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// A validation check missed its tolerance.
    ChecksFailed,
    /// A numerical routine failed; outputs written so far are flagged
    /// partial.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub experiment: String,
    /// SHA-256 of the resolved configuration (output location excluded).
    pub config_hash: String,
    pub seed: u64,
    pub trials: u64,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn checksum(&self, file: &str) -> Option<&str> {
        self.outputs.iter().find(|o| o.file == file).map(|o| o.sha256.as_str())
    }
}
