//! Run manifests: every report embeds the command, its parsed config, the
//! effective seed, the tool version, wall time, and SHA-256 digests of the
//! input files. Identical manifests (wall time aside) in sequential mode
//! mean byte-identical payloads.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub wall_ms: u64,
    pub input_digests: BTreeMap<String, String>,
}

pub struct ManifestBuilder {
    command: String,
    config: BTreeMap<String, String>,
    seed: Option<u64>,
    digests: BTreeMap<String, String>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> ManifestBuilder {
        ManifestBuilder {
            command: command.to_string(),
            config: BTreeMap::new(),
            seed: None,
            digests: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        let mut hasher = Sha256::new();
        hasher.update(bytes);
        self.digests
            .insert(path.display().to_string(), hex::encode(hasher.finalize()));
        self
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_ms: self.started.elapsed().as_millis() as u64,
            input_digests: self.digests,
        }
    }
}
