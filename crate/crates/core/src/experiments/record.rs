use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// File name of the manifest inside a run directory.
pub const MANIFEST: &str = "manifest.json";

/// An output file of a run, relative to the run directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub kind: String,
    pub path: String,
}

/// A named scalar result and the artifact it was read from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub artifact: String,
}

/// Manifest of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub command: String,
    pub config: serde_json::Value,
    pub outputs: Vec<Artifact>,
    pub metrics: BTreeMap<String, Metric>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Content hash of a command and its configuration.
///
/// The configuration is serialized with sorted keys, so equal configurations hash equally.
pub fn run_id(command: &str, config: &serde_json::Value) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0u8]);
    h.update(config.to_string().as_bytes());
    hex::encode(&h.finalize()[..8])
}

impl RunRecord {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        Ok(Self {
            run_id: run_id(command, &config),
            command: command.to_owned(),
            config,
            outputs: Vec::new(),
            metrics: BTreeMap::new(),
            started_unix: now(),
            finished_unix: 0,
        })
    }

    /// Directory of this run under `root`.
    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(&self.run_id)
    }

    /// Registers an artifact written to `path` relative to the run directory.
    pub fn add_output(&mut self, kind: &str, path: &str) {
        self.outputs.push(Artifact { kind: kind.to_owned(), path: path.to_owned() });
    }

    /// Records a finite metric read from a registered artifact.
    pub fn add_metric(&mut self, name: &str, value: f64, artifact: &str) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::numerical(format!("metric {name} is not finite")));
        }
        if !self.outputs.iter().any(|a| a.kind == artifact) {
            return Err(Error::validation(format!("metric {name} refers to unknown artifact {artifact}")));
        }
        self.metrics.insert(name.to_owned(), Metric { value, artifact: artifact.to_owned() });
        Ok(())
    }

    /// Writes the manifest into the run directory under `root`, stamping the finish time.
    pub fn store(&mut self, root: &Path) -> Result<PathBuf> {
        let dir = self.dir(root);
        fs::create_dir_all(&dir)?;
        self.finished_unix = now();
        let path = dir.join(MANIFEST);
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
