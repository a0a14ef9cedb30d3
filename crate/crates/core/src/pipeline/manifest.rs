use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::pipeline::config::RunConfig;

/// Git object id of a blob in a SHA-256 repository:
/// sha256("blob <len>\0" ‖ content).
pub fn git_blob_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

pub fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Provenance of one command invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub variant: Option<String>,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub worker_threads: usize,
    /// Named scalar results: calibration scales, flags, fitted values.
    pub results: BTreeMap<String, serde_json::Value>,
    /// File name → git-style SHA-256 blob id.
    pub files: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, variant: Option<&str>, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            variant: variant.map(str::to_string),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config: config.clone(),
            started_unix_s: unix_time(),
            finished_unix_s: 0,
            worker_threads: rayon::current_num_threads(),
            results: BTreeMap::new(),
            files: BTreeMap::new(),
        }
    }

    pub fn record<T: Serialize>(&mut self, key: &str, value: T) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Writes `content` to `dir/name` and records its hash.
    pub fn emit(&mut self, dir: &Path, name: &str, content: &[u8]) -> Result<()> {
        std::fs::write(dir.join(name), content)?;
        self.files.insert(name.to_string(), git_blob_hash(content));
        Ok(())
    }

    pub fn finish(self, dir: &Path) -> Result<Self> {
        self.finish_as(dir, "manifest.json")
    }

    pub fn finish_as(mut self, dir: &Path, name: &str) -> Result<Self> {
        self.finished_unix_s = unix_time();
        let text = serde_json::to_string_pretty(&self)?;
        std::fs::write(dir.join(name), text + "\n")?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_hash_matches_git_sha256_format() {
        // printf 'hello\n' | git hash-object --object-format=sha256 --stdin
        assert_eq!(git_blob_hash(b"hello\n"), "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
    }
}
