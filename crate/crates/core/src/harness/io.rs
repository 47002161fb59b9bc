use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, HarnessError};
use crate::ddpg::{Agent, AgentCheckpoint, AGENT_FORMAT, AGENT_FORMAT_VERSION};

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn sha256_file(path: &Path) -> Result<String, HarnessError> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

pub fn save_agent(path: &Path, agent: &Agent) -> Result<(), HarnessError> {
    let text = serde_json::to_string(&AgentCheckpoint::from(agent)).expect("checkpoint serializes");
    write_file(path, text.as_bytes())
}

/// Reads an agent checkpoint, telling truncation, foreign files and
/// version mismatches apart.
pub fn load_agent(path: &Path) -> Result<Agent, HarnessError> {
    Ok(read_checkpoint(path)?.to_agent()?)
}

pub(crate) fn read_checkpoint(path: &Path) -> Result<AgentCheckpoint, HarnessError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        if e.is_eof() {
            HarnessError::TruncatedCheckpoint { path: shown.clone() }
        } else {
            HarnessError::CheckpointFormat {
                path: shown.clone(),
                message: e.to_string(),
            }
        }
    })?;
    let format = value.get("format").and_then(|f| f.as_str());
    if format != Some(AGENT_FORMAT) {
        return Err(HarnessError::CheckpointFormat {
            path: shown,
            message: format!("expected format {AGENT_FORMAT:?}, found {format:?}"),
        });
    }
    match value.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(AGENT_FORMAT_VERSION) => {}
        Some(found) => {
            return Err(HarnessError::CheckpointVersion {
                path: shown,
                found,
                expected: AGENT_FORMAT_VERSION,
            })
        }
        None => {
            return Err(HarnessError::CheckpointFormat {
                path: shown,
                message: "missing integer field \"version\"".into(),
            })
        }
    }
    serde_json::from_value(value).map_err(|e| HarnessError::CheckpointFormat {
        path: shown,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
}

/// What produced a directory of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub inputs: Vec<Artifact>,
    pub artifacts: Vec<Artifact>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            config: cfg.clone(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), HarnessError> {
        self.inputs.push(Artifact {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    /// Records `path`, which must lie under `root`.
    pub fn add_artifact(&mut self, root: &Path, path: &Path) -> Result<(), HarnessError> {
        let rel: PathBuf = path.strip_prefix(root).unwrap_or(path).to_path_buf();
        self.artifacts.push(Artifact {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}
