use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::ddpg::{DdpgConfig, TrainConfig};
use crate::es::averaging::QuadraticBenchmark;
use crate::es::EsParams;
use crate::sim::{FrictionMap, GoalSource, ObjectPlacement, Scene, Task, WorkspaceSpec};
use crate::supervisor::{Mode, RunOptions};

/// Everything a run depends on. Missing tables take their defaults;
/// unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub seed: u64,
    pub workspace: WorkspaceSpec,
    pub friction: FrictionMap,
    pub goal: GoalSource,
    pub object: ObjectPlacement,
    pub agent: DdpgConfig,
    pub train: TrainConfig,
    pub es: EsParams,
    pub eval: EvalConfig,
    pub scenario: ScenarioConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: Task::Push,
            seed: 0,
            workspace: WorkspaceSpec::default(),
            friction: FrictionMap::default(),
            goal: GoalSource::random_default(),
            object: ObjectPlacement::default(),
            agent: DdpgConfig::default(),
            train: TrainConfig::default(),
            es: EsParams::default(),
            eval: EvalConfig::default(),
            scenario: ScenarioConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub episodes: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { episodes: 100 }
    }
}

/// Multi-seed comparison of controller modes on the configured scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Label used for the output directory.
    pub name: String,
    /// Scene reset seeds are `0..seeds`.
    pub seeds: u64,
    pub modes: Vec<Mode>,
    pub tracking_window: f64,
    pub tracking_threshold: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let run = RunOptions::default();
        Self {
            name: "custom".into(),
            seeds: 20,
            modes: Mode::ALL.to_vec(),
            tracking_window: run.tracking_window,
            tracking_threshold: run.tracking_threshold,
        }
    }
}

/// Quadratic averaging benchmark swept over base frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub omegas: Vec<f64>,
    pub x0: Vec<f64>,
    pub k: f64,
    pub alpha: f64,
    pub ratios: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub noise_std: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let b = QuadraticBenchmark::default();
        Self {
            omegas: vec![25.0, 50.0, 100.0, 200.0],
            x0: b.x0,
            k: b.k,
            alpha: b.alpha,
            ratios: b.ratios,
            horizon: b.horizon,
            dt: b.dt,
            noise_std: b.noise_std,
        }
    }
}

impl VerifyConfig {
    pub fn benchmark(&self, seed: u64) -> QuadraticBenchmark {
        QuadraticBenchmark {
            x0: self.x0.clone(),
            k: self.k,
            alpha: self.alpha,
            ratios: self.ratios.clone(),
            horizon: self.horizon,
            dt: self.dt,
            noise_std: self.noise_std,
            seed,
        }
    }

    fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.omegas.is_empty() {
            errors.push("verify.omegas: must not be empty".into());
        }
        if self.omegas.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            errors.push("verify.omegas: every frequency must be positive".into());
        }
        if self.omegas.windows(2).any(|w| w[0] >= w[1]) {
            errors.push(format!("verify.omegas: must be strictly ascending, got {:?}", self.omegas));
        }
        if self.x0.is_empty() || self.x0.len() > self.ratios.len() {
            errors.push(format!(
                "verify.x0: need between 1 and {} components (one per ratio), got {}",
                self.ratios.len(),
                self.x0.len()
            ));
        }
        for (name, v) in [("k", self.k), ("alpha", self.alpha), ("noise_std", self.noise_std)] {
            if !(v >= 0.0 && v.is_finite()) {
                errors.push(format!("verify.{name}: must be non-negative, got {v}"));
            }
        }
        if !(self.dt > 0.0 && self.horizon >= 0.0 && self.horizon.is_finite()) {
            errors.push("verify: need dt > 0 and horizon >= 0".into());
        }
        errors
    }
}

impl ExperimentConfig {
    /// Reads TOML or JSON, chosen by file extension (`.json` is JSON,
    /// anything else TOML), and validates the result.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
        .map_err(|e| match e {
            HarnessError::Parse { message, .. } => HarnessError::Parse {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Parse {
            path: "<toml>".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Parse {
            path: "<json>".into(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Full-size networks, batch and replay; replaces every agent setting.
    pub fn with_paper_scale(mut self) -> Self {
        self.agent = DdpgConfig::paper_scale();
        self
    }

    /// Every problem found, each prefixed with its field path.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = self.scene_unchecked().validation_errors();
        errors.extend(self.agent.validation_errors());
        errors.extend(self.train.validation_errors());
        errors.extend(self.es.validation_errors());
        if self.es.ratios.len() < crate::es::ES_CHANNELS {
            errors.push(format!(
                "es.ratios: need {} ratios, one per position channel, got {}",
                crate::es::ES_CHANNELS,
                self.es.ratios.len()
            ));
        }
        if self.eval.episodes == 0 {
            errors.push("eval.episodes: must be positive".into());
        }
        let s = &self.scenario;
        if s.name.is_empty() || s.name.contains(['/', '\\']) {
            errors.push(format!("scenario.name: must be a non-empty file name, got {:?}", s.name));
        }
        if s.seeds == 0 {
            errors.push("scenario.seeds: must be positive".into());
        }
        if s.modes.is_empty() {
            errors.push("scenario.modes: must list at least one mode".into());
        }
        if !(s.tracking_window > 0.0 && s.tracking_window <= 1.0) {
            errors.push(format!("scenario.tracking_window: must lie in (0, 1], got {}", s.tracking_window));
        }
        if !(s.tracking_threshold > 0.0 && s.tracking_threshold.is_finite()) {
            errors.push(format!(
                "scenario.tracking_threshold: must be positive, got {}",
                s.tracking_threshold
            ));
        }
        errors.extend(self.verify.validation_errors());
        errors
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::InvalidConfig(errors))
        }
    }

    fn scene_unchecked(&self) -> Scene {
        Scene {
            task: self.task,
            workspace: self.workspace.clone(),
            friction: self.friction.clone(),
            goal: self.goal,
            object: self.object,
        }
    }

    pub fn scene(&self) -> Result<Scene, HarnessError> {
        Scene::new(self.task, self.workspace.clone(), self.friction.clone(), self.goal, self.object)
            .map_err(|e| HarnessError::InvalidConfig(e.0))
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            horizon: self.workspace.horizon,
            tracking_window: self.scenario.tracking_window,
            tracking_threshold: self.scenario.tracking_threshold,
        }
    }

    /// SHA-256 of the canonical JSON form (keys sorted, shortest
    /// round-trip floats). Independent of the source file's layout.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("value serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }
}
