//! Run manifests: what was run, with which seeds, and digests of what it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::spec::ExperimentSpec;

pub const MANIFEST_NAME: &str = "run_manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    /// False for files such as wall-clock timings that differ between runs.
    pub deterministic: bool,
}

impl OutputRecord {
    pub fn new(path: &str, bytes: &[u8], deterministic: bool) -> Self {
        OutputRecord {
            path: path.into(),
            sha256: sha256_hex(bytes),
            deterministic,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec_digest: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub seeds: Vec<u64>,
    /// Directory the spec's relative paths were resolved against.
    pub config_dir: PathBuf,
    pub spec: ExperimentSpec,
    pub outputs: Vec<OutputRecord>,
}

pub fn spec_digest(spec: &ExperimentSpec) -> String {
    sha256_hex(&serde_json::to_vec(spec).expect("spec serializes"))
}

impl RunManifest {
    pub fn new(spec: &ExperimentSpec, config_dir: &Path, seeds: Vec<u64>, outputs: Vec<OutputRecord>) -> Self {
        RunManifest {
            spec_digest: spec_digest(spec),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            seeds,
            config_dir: config_dir.to_path_buf(),
            spec: spec.clone(),
            outputs,
        }
    }

    pub fn write(&self, out: &Path) -> Result<PathBuf> {
        let path = out.join(MANIFEST_NAME);
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Parses `text` as a manifest if it has the manifest shape.
    pub fn detect(text: &str) -> Option<Self> {
        let v: serde_json::Value = serde_json::from_str(text).ok()?;
        v.get("spec_digest")?;
        serde_json::from_value(v).ok()
    }

    /// Deterministic outputs in `out` whose digest differs from the record.
    pub fn mismatches(&self, out: &Path) -> Vec<String> {
        self.outputs
            .iter()
            .filter(|o| o.deterministic)
            .filter(|o| fs::read(out.join(&o.path)).map(|b| sha256_hex(&b) != o.sha256).unwrap_or(true))
            .map(|o| o.path.clone())
            .collect()
    }
}
