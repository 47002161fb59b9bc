use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::io::{read_checkpoint, save_agent, write_file, write_json};
use super::{ExperimentConfig, HarnessError, RunManifest};
use crate::ddpg::{train, Agent, EpochRecord, ReplayBuffer, TrainReport};
use crate::sim::Episode;
use crate::supervisor::{run_episode, EpisodeSummary, FailureKind, Mode};
use crate::tensor::Mlp;

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub agent: Agent,
    pub report: TrainReport,
    pub checkpoint: PathBuf,
    pub manifest: PathBuf,
}

/// Trains a fresh agent on the configured scene and writes
/// `checkpoint.json`, `curve.jsonl` and `manifest.json` under `out`.
pub fn cmd_train<F>(cfg: &ExperimentConfig, out: &Path, on_epoch: F) -> Result<TrainOutput, HarnessError>
where
    F: FnMut(&EpochRecord),
{
    cfg.validate()?;
    let mut env = Episode::new(cfg.scene()?);
    let mut agent = Agent::new(cfg.agent.clone(), cfg.seed)?;
    let mut replay = ReplayBuffer::new(cfg.agent.buffer_capacity);
    let report = train(
        &mut env,
        &mut agent,
        &mut replay,
        &cfg.train,
        cfg.seed.wrapping_add(1),
        on_epoch,
    )?;

    let checkpoint = out.join("checkpoint.json");
    save_agent(&checkpoint, &agent)?;
    let curve_path = out.join("curve.jsonl");
    let mut curve = String::new();
    for r in &report.curve {
        curve.push_str(&serde_json::to_string(r).expect("record serializes"));
        curve.push('\n');
    }
    write_file(&curve_path, curve.as_bytes())?;

    let mut manifest = RunManifest::new("train", cfg);
    manifest.add_artifact(out, &checkpoint)?;
    manifest.add_artifact(out, &curve_path)?;
    let manifest = manifest.write(out)?;
    Ok(TrainOutput {
        agent,
        report,
        checkpoint,
        manifest,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_final_d2: f64,
    pub left_workspace: usize,
}

/// Noise-free rollouts of the actor on `cfg.eval.episodes` seeded resets;
/// writes `eval.json` and `manifest.json`.
pub fn cmd_eval(
    cfg: &ExperimentConfig,
    actor: &Mlp,
    checkpoint: Option<&Path>,
    out: &Path,
) -> Result<EvalReport, HarnessError> {
    cfg.validate()?;
    let scene = cfg.scene()?;
    let opts = cfg.run_options();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut successes = 0;
    let mut left = 0;
    let mut d2_sum = 0.0;
    for _ in 0..cfg.eval.episodes {
        let log = run_episode(&scene, rng.next_u64(), Some(actor), &cfg.es, Mode::RlOnly, &opts)?;
        successes += log.summary.success as usize;
        left += (log.summary.failure == Some(FailureKind::LeftWorkspace)) as usize;
        d2_sum += log.summary.final_d2;
    }
    let n = cfg.eval.episodes;
    let report = EvalReport {
        episodes: n,
        successes,
        success_rate: successes as f64 / n as f64,
        mean_final_d2: d2_sum / n as f64,
        left_workspace: left,
    };
    let path = out.join("eval.json");
    write_json(&path, &report)?;
    let mut manifest = RunManifest::new("eval", cfg);
    if let Some(c) = checkpoint {
        manifest.add_input(c)?;
    }
    manifest.add_artifact(out, &path)?;
    manifest.write(out)?;
    Ok(report)
}

/// Per-mode totals over all scenario seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAggregate {
    pub mode: Mode,
    pub episodes: usize,
    pub success_rate: f64,
    pub left_workspace: usize,
    pub not_reached: usize,
    pub mean_final_d2: f64,
    pub mean_tracking_error: f64,
    pub mean_tail_tracking_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub episodes: Vec<EpisodeSummary>,
    pub aggregates: Vec<ModeAggregate>,
}

impl ScenarioReport {
    pub fn aggregate(&self, mode: Mode) -> Option<&ModeAggregate> {
        self.aggregates.iter().find(|a| a.mode == mode)
    }
}

fn aggregate(mode: Mode, eps: &[&EpisodeSummary]) -> ModeAggregate {
    let n = eps.len() as f64;
    let mean = |f: fn(&EpisodeSummary) -> f64| eps.iter().map(|e| f(e)).sum::<f64>() / n;
    ModeAggregate {
        mode,
        episodes: eps.len(),
        success_rate: eps.iter().filter(|e| e.success).count() as f64 / n,
        left_workspace: eps.iter().filter(|e| e.failure == Some(FailureKind::LeftWorkspace)).count(),
        not_reached: eps.iter().filter(|e| e.failure == Some(FailureKind::NotReached)).count(),
        mean_final_d2: mean(|e| e.final_d2),
        mean_tracking_error: mean(|e| e.mean_tracking_error),
        mean_tail_tracking_error: mean(|e| e.tail_tracking_error),
    }
}

fn opt_str<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Runs every configured mode on reset seeds `seed..seed + seeds` and
/// writes, under `out/<scenario name>/`, one trajectory CSV per
/// (mode, seed), `summary.csv`, `summary.json` and `manifest.json`.
pub fn cmd_scenario(
    cfg: &ExperimentConfig,
    actor: Option<&Mlp>,
    checkpoint: Option<&Path>,
    out: &Path,
) -> Result<ScenarioReport, HarnessError> {
    cfg.validate()?;
    let needs_actor = cfg.scenario.modes.iter().any(|m| *m != Mode::EsOnly);
    if needs_actor && actor.is_none() {
        return Err(HarnessError::Usage(
            "scenario modes rl_only and hybrid need a trained actor (pass a checkpoint)".into(),
        ));
    }
    let scene = cfg.scene()?;
    let opts = cfg.run_options();
    let root = out.join(&cfg.scenario.name);
    let mut manifest = RunManifest::new("scenario", cfg);
    if let Some(c) = checkpoint {
        manifest.add_input(c)?;
    }
    let mut episodes = Vec::new();
    for &mode in &cfg.scenario.modes {
        for i in 0..cfg.scenario.seeds {
            let seed = cfg.seed.wrapping_add(i);
            let log = run_episode(&scene, seed, actor, &cfg.es, mode, &opts)?;
            let path = root.join(mode.name()).join(format!("seed_{seed:03}.csv"));
            let mut buf = Vec::new();
            log.write_csv(&mut buf)?;
            write_file(&path, &buf)?;
            manifest.add_artifact(&root, &path)?;
            episodes.push(log.summary);
        }
    }
    let aggregates: Vec<_> = cfg
        .scenario
        .modes
        .iter()
        .map(|&m| {
            let eps: Vec<_> = episodes.iter().filter(|e| e.mode == m).collect();
            aggregate(m, &eps)
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "mode",
        "seed",
        "steps",
        "success",
        "failure",
        "final_d2",
        "mean_tracking_error",
        "tail_tracking_error",
        "switch_step",
    ])?;
    for e in &episodes {
        let failure = e.failure.map(|f| match f {
            FailureKind::LeftWorkspace => "left_workspace",
            FailureKind::NotReached => "not_reached",
        });
        w.write_record([
            e.mode.name().to_string(),
            e.seed.to_string(),
            e.steps.to_string(),
            (e.success as u8).to_string(),
            opt_str(failure),
            e.final_d2.to_string(),
            e.mean_tracking_error.to_string(),
            e.tail_tracking_error.to_string(),
            opt_str(e.switch_step),
        ])?;
    }
    let summary_csv = root.join("summary.csv");
    write_file(&summary_csv, &w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)?;
    manifest.add_artifact(&root, &summary_csv)?;

    let report = ScenarioReport {
        scenario: cfg.scenario.name.clone(),
        episodes,
        aggregates,
    };
    let summary_json = root.join("summary.json");
    write_json(&summary_json, &report)?;
    manifest.add_artifact(&root, &summary_json)?;
    manifest.write(&root)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub omega: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap <= w[0].gap)
    }
}

/// Sweeps the quadratic averaging benchmark over `cfg.verify.omegas`.
/// Writes `es_verify.csv` with one `(omega, gap)` row per frequency and,
/// per frequency, `es_verify_omega_<ω>.csv` with columns
/// `t, es_x…, avg_x…, gap` sampled every `stride` integration steps.
pub fn cmd_es_verify(cfg: &ExperimentConfig, out: &Path, stride: usize) -> Result<VerifyReport, HarnessError> {
    cfg.validate()?;
    let bench = cfg.verify.benchmark(cfg.seed);
    let stride = stride.max(1);
    let mut rows = Vec::new();
    let mut manifest = RunManifest::new("es-verify", cfg);
    for &omega in &cfg.verify.omegas {
        let run = bench.run(omega)?;
        let n = bench.x0.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("es_x{i}")));
        header.extend((1..=n).map(|i| format!("avg_x{i}")));
        header.push("gap".into());
        w.write_record(&header)?;
        for j in (0..run.es.len()).step_by(stride) {
            let (a, b) = (&run.es.points[j], &run.averaged.points[j]);
            let gap = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let mut row = vec![run.es.times[j].to_string()];
            row.extend(a.iter().chain(b).map(|v| v.to_string()));
            row.push(gap.to_string());
            w.write_record(&row)?;
        }
        let path = out.join(format!("es_verify_omega_{omega}.csv"));
        write_file(&path, &w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)?;
        manifest.add_artifact(out, &path)?;
        rows.push(VerifyRow { omega, gap: run.gap });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["omega", "gap"])?;
    for r in &rows {
        w.write_record([r.omega.to_string(), r.gap.to_string()])?;
    }
    let path = out.join("es_verify.csv");
    write_file(&path, &w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)?;
    manifest.add_artifact(out, &path)?;
    manifest.write(out)?;
    Ok(VerifyReport { rows })
}

/// What `inspect-checkpoint` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub format: String,
    pub version: u32,
    pub actor_layers: Vec<usize>,
    pub critic_layers: Vec<usize>,
    pub actor_parameters: usize,
    pub critic_parameters: usize,
    pub optimizer_steps: [u64; 2],
    pub hyperparameters: crate::ddpg::DdpgConfig,
    pub sha256: String,
}

pub fn cmd_inspect_checkpoint(path: &Path) -> Result<CheckpointSummary, HarnessError> {
    let ck = read_checkpoint(path)?;
    let layers = |r: &crate::tensor::MlpRecord| {
        let mut v = vec![r.spec.input_dim];
        v.extend(&r.spec.hidden_dims);
        v.push(r.spec.output_dim);
        v
    };
    let count = |r: &crate::tensor::MlpRecord| r.params.iter().map(|p| p.data.len()).sum();
    Ok(CheckpointSummary {
        format: ck.format.clone(),
        version: ck.version,
        actor_layers: layers(&ck.actor),
        critic_layers: layers(&ck.critic),
        actor_parameters: count(&ck.actor),
        critic_parameters: count(&ck.critic),
        optimizer_steps: [ck.actor_optimizer.step, ck.critic_optimizer.step],
        hyperparameters: ck.hyperparameters.clone(),
        sha256: super::sha256_file(path)?,
    })
}
