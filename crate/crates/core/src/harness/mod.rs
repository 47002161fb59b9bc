//! Experiment orchestration: configuration, the train / eval / scenario /
//! averaging-verification commands, persistence and run manifests.
//!
//! Every command is a plain function over an [`ExperimentConfig`] and an
//! output directory, so examples, tests and the command-line binary share
//! one code path. Outputs contain no timestamps or host details; rerunning
//! a command with the same configuration reproduces its files byte for
//! byte.

mod commands;
mod config;
mod io;
mod scenario;

pub use commands::{
    cmd_es_verify, cmd_eval, cmd_inspect_checkpoint, cmd_scenario, cmd_train, CheckpointSummary, EvalReport,
    ModeAggregate, ScenarioReport, TrainOutput, VerifyReport, VerifyRow,
};
pub use config::{EvalConfig, ExperimentConfig, ScenarioConfig, VerifyConfig};
pub use io::{load_agent, save_agent, sha256_file, Artifact, RunManifest};
pub use scenario::ScenarioName;

use std::path::Path;

use thiserror::Error;

use crate::ddpg::DdpgError;
use crate::es::EsError;
use crate::supervisor::SupervisorError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),
    #[error("{path}: file ends early; the checkpoint is truncated or still being written")]
    TruncatedCheckpoint { path: String },
    #[error("{path}: not an agent checkpoint: {message}")]
    CheckpointFormat { path: String, message: String },
    #[error(
        "{path}: checkpoint format version {found} is not supported (this build reads version {expected}); \
         re-save it with a build that writes version {expected}"
    )]
    CheckpointVersion { path: String, found: u64, expected: u32 },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Agent(#[from] DdpgError),
    #[error(transparent)]
    Es(#[from] EsError),
    #[error(transparent)]
    Supervisor(#[from] SupervisorError),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
