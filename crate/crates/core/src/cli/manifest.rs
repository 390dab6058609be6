//! Run manifest: everything needed to repeat a run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::RawConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub backend: String,
    pub mode: String,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub threads: usize,
    pub paper_literal: bool,
    /// Carbon targets of a sweep; empty for a single run.
    #[serde(default)]
    pub sweep_cer: Vec<f64>,
    /// Resolved config as used, paper-literal switch included.
    pub config: RawConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_path: Option<PathBuf>,
    /// Hash of the series CSV bytes (as generated for synthetic runs).
    pub series_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSource>,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub wall_ms: u64,
    #[serde(default)]
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    /// Per-iteration wall time of a decomposed run, in ms.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iteration_wall_ms: Vec<u64>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSource {
    pub seed: u64,
    pub profile: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}
