//! Run manifests: what was run, on what, with which settings, producing what.

use anyhow::{Context, Result};
use cpflow::flow::hex_digest;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub converged: bool,
    pub final_residual: f64,
    pub t_final: f64,
    pub steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: String,
    pub argv: Vec<String>,
    pub version: &'static str,
    pub config: C,
    pub config_hash: String,
    pub input: Artifact,
    pub complex_hash: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<Artifact>,
    pub summary: Summary,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

pub fn artifact(path: &Path) -> Result<Artifact> {
    let bytes = std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(Artifact { path: path.to_path_buf(), sha256: hex_digest(&bytes) })
}

/// Hash of the canonical JSON form of a config.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    hex_digest(serde_json::to_string(config).expect("serializable").as_bytes())
}
