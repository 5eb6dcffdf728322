use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, data: &[u8]) -> Self {
        InputDigest {
            path: path.display().to_string(),
            bytes: data.len(),
            sha256: hex::encode(Sha256::digest(data)),
        }
    }
}

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: String,
    pub command: String,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, InputDigest>,
    pub timing_ms: BTreeMap<String, u128>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect::<Vec<_>>().join(" "),
            command: command.to_string(),
            seed: config.seed,
            outputs: Vec::new(),
            config: config.clone(),
            inputs: BTreeMap::new(),
            timing_ms: BTreeMap::new(),
            summary: BTreeMap::new(),
        }
    }

    /// Runs `f` and records its wall time under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timing_ms
            .insert(stage.to_string(), start.elapsed().as_millis());
        out
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.insert(key.to_string(), value.to_string());
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = toml::to_string(self).map_err(|e| CliError::Output(e.to_string()))?;
        crate::output::write_file(dir, MANIFEST_FILE, text.as_bytes())
    }
}
