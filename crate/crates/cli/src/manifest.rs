use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Incomplete,
    Error,
}

/// Provenance record for one invocation. Kept apart from the report so the
/// report itself stays byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    /// SHA-256 over the input files in argument order; null when there are none.
    pub input_hash: Option<String>,
    pub outcome: Outcome,
    pub exit_code: i32,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn hash_inputs(files: &[PathBuf]) -> std::io::Result<Option<String>> {
    if files.is_empty() {
        return Ok(None);
    }
    let mut hasher = Sha256::new();
    for f in files {
        hasher.update(std::fs::read(f)?);
    }
    Ok(Some(hex::encode(hasher.finalize())))
}

pub fn write(path: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    std::fs::write(path, text)
}
