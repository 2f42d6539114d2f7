//! Run manifests: a JSON record of what a command was given and what it wrote.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::serialize_config;
use crate::evolution::{Abort, SimConfig};
use crate::snapshot::write_bytes_atomic;

/// SHA-256 of the canonical config text, framed like a git blob
/// (`"blob <len>\0" + text`), in lowercase hex.
pub fn config_hash(config: &SimConfig) -> String {
    let text = serialize_config(config);
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<SimConfig>,
    pub started: f64,
    pub finished: Option<f64>,
    pub files: Vec<PathBuf>,
    pub abort: Option<Abort>,
}

impl RunManifest {
    pub fn start(command: &str, config: Option<SimConfig>) -> Self {
        Self { command: command.to_string(), config, started: unix_now(), finished: None, files: Vec::new(), abort: None }
    }

    pub fn add_file(&mut self, path: &Path) {
        self.files.push(path.to_path_buf());
    }

    pub fn finish(&mut self, abort: Option<Abort>) {
        self.finished = Some(unix_now());
        self.abort = abort;
    }

    pub fn to_json(&self) -> Value {
        let abort = self.abort.as_ref().map(|a| json!({ "reason": a.reason.to_string(), "last_good_time": a.last_good_time }));
        json!({
            "command": self.command,
            "config": self.config.as_ref().map(serialize_config),
            "config_hash": self.config.as_ref().map(config_hash),
            "start_unix_s": self.started,
            "end_unix_s": self.finished,
            "files": self.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "status": if self.abort.is_some() { "aborted" } else { "ok" },
            "abort": abort,
        })
    }

    /// Writes the manifest and lists its own path in it.
    pub fn write(&mut self, path: &Path) -> std::io::Result<()> {
        self.add_file(path);
        let text = serde_json::to_string_pretty(&self.to_json()).map_err(std::io::Error::other)?;
        write_bytes_atomic(path, format!("{text}\n").as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::AbortReason;

    #[test]
    fn hash_is_deterministic_and_sensitive() {
        let a = SimConfig::default();
        let b = SimConfig { t_end: 50.0, ..SimConfig::default() };
        assert_eq!(config_hash(&a), config_hash(&a.clone()));
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn manifest_lists_files_and_abort() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::start("simulate", Some(SimConfig::default()));
        m.add_file(&dir.path().join("diagnostics.csv"));
        m.finish(Some(Abort { reason: AbortReason::NonFinite, last_good_time: 1.5 }));
        let path = dir.path().join("manifest.json");
        m.write(&path).unwrap();
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["status"], "aborted");
        assert_eq!(v["abort"]["last_good_time"], 1.5);
        assert_eq!(v["files"].as_array().unwrap().len(), 2);
        assert_eq!(v["config_hash"], config_hash(&SimConfig::default()));
    }
}
