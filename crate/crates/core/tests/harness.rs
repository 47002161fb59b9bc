use std::path::{Path, PathBuf};

use esdrl::ddpg::{Agent, DdpgConfig};
use esdrl::harness::{
    cmd_es_verify, cmd_eval, cmd_inspect_checkpoint, cmd_scenario, cmd_train, load_agent, save_agent,
    ExperimentConfig, HarnessError, RunManifest, ScenarioName,
};
use esdrl::sim::{GoalSpec, Task};
use esdrl::supervisor::Mode;

fn tiny_agent() -> DdpgConfig {
    DdpgConfig {
        hidden_dims: vec![8],
        warmup: 20,
        batch_size: 8,
        random_action_steps: 10,
        ..DdpgConfig::default()
    }
}

fn params(agent: &Agent) -> Vec<Vec<f64>> {
    [&agent.actor, &agent.critic, &agent.target_actor, &agent.target_critic]
        .iter()
        .flat_map(|n| n.param_slices().into_iter().map(|s| s.to_vec()))
        .collect()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn shipped_scenario_configs_match_the_presets() {
    for name in ScenarioName::ALL {
        let path = configs_dir().join(format!("{}.toml", name.name()));
        let loaded = ExperimentConfig::load(&path).unwrap();
        assert_eq!(loaded, name.preset(), "{}", path.display());
    }
}

#[test]
fn invalid_config_file_reports_each_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[agent]\ntau = 2.0\n\n[es]\nratios = [1.0, 1.0, 2.0]\n\n[eval]\nepisodes = 0\n").unwrap();
    match ExperimentConfig::load(&path) {
        Err(HarnessError::InvalidConfig(errors)) => {
            let text = errors.join("\n");
            for field in ["agent.tau", "es.ratios", "eval.episodes"] {
                assert!(text.contains(field), "missing {field} in\n{text}");
            }
        }
        other => panic!("expected InvalidConfig, got {other:?}"),
    }
}

#[test]
fn unparsable_config_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"seed\": }").unwrap();
    let err = ExperimentConfig::load(&path).unwrap_err();
    assert!(matches!(err, HarnessError::Parse { .. }));
    assert!(err.to_string().contains("broken.json"));
}

#[test]
fn paper_scale_restores_the_full_size_agent() {
    let cfg = ExperimentConfig::default().with_paper_scale();
    assert_eq!(cfg.agent, DdpgConfig::paper_scale());
    assert_eq!(cfg.agent.hidden_dims, vec![256, 256]);
    assert_eq!(cfg.agent.batch_size, 256);
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.agent = tiny_agent();
    cfg.train.epochs = 2;
    cfg.train.episodes_per_epoch = 2;
    let out = cmd_train(&cfg, dir.path(), |_| {}).unwrap();
    assert!(out.report.updates > 0);
    let loaded = load_agent(&out.checkpoint).unwrap();
    assert_eq!(params(&loaded), params(&out.agent));
    assert_eq!(loaded.actor_opt, out.agent.actor_opt);
    assert_eq!(loaded.critic_opt, out.agent.critic_opt);
    assert_eq!(loaded.config, out.agent.config);

    let again = dir.path().join("again.json");
    save_agent(&again, &loaded).unwrap();
    assert_eq!(std::fs::read(&again).unwrap(), std::fs::read(&out.checkpoint).unwrap());
}

#[test]
fn train_writes_curve_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.agent = tiny_agent();
    cfg.train.epochs = 3;
    cfg.train.episodes_per_epoch = 1;
    let mut seen = Vec::new();
    let out = cmd_train(&cfg, dir.path(), |r| seen.push(r.epoch)).unwrap();
    assert_eq!(seen, vec![0, 1, 2]);
    let curve = std::fs::read_to_string(dir.path().join("curve.jsonl")).unwrap();
    assert_eq!(curve.lines().count(), 3);
    let manifest: RunManifest = serde_json::from_str(&std::fs::read_to_string(&out.manifest).unwrap()).unwrap();
    assert_eq!(manifest.command, "train");
    assert_eq!(manifest.config_hash, cfg.hash());
    let names: Vec<&str> = manifest.artifacts.iter().map(|a| a.path.as_str()).collect();
    assert_eq!(names, ["checkpoint.json", "curve.jsonl"]);
}

#[test]
fn zero_epochs_saves_the_initial_agent() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.agent = tiny_agent();
    cfg.train.epochs = 0;
    let out = cmd_train(&cfg, dir.path(), |_| {}).unwrap();
    assert!(out.report.curve.is_empty());
    assert_eq!(out.report.env_steps, 0);
    let fresh = Agent::new(tiny_agent(), cfg.seed).unwrap();
    assert_eq!(params(&load_agent(&out.checkpoint).unwrap()), params(&fresh));
}

fn saved_checkpoint(dir: &Path) -> PathBuf {
    let path = dir.join("agent.json");
    save_agent(&path, &Agent::new(tiny_agent(), 4).unwrap()).unwrap();
    path
}

#[test]
fn truncated_checkpoint_is_reported_as_such() {
    let dir = tempfile::tempdir().unwrap();
    let path = saved_checkpoint(dir.path());
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    let err = load_agent(&path).unwrap_err();
    assert!(matches!(err, HarnessError::TruncatedCheckpoint { .. }), "{err}");
}

#[test]
fn newer_checkpoint_version_is_refused_with_a_hint() {
    let dir = tempfile::tempdir().unwrap();
    let path = saved_checkpoint(dir.path());
    let text = std::fs::read_to_string(&path).unwrap().replacen("\"version\":1", "\"version\":2", 1);
    std::fs::write(&path, text).unwrap();
    let err = load_agent(&path).unwrap_err();
    assert!(matches!(err, HarnessError::CheckpointVersion { found: 2, expected: 1, .. }), "{err}");
    assert!(err.to_string().contains("re-save"));
}

#[test]
fn foreign_json_is_not_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, serde_json::to_string(&ExperimentConfig::default()).unwrap()).unwrap();
    assert!(matches!(load_agent(&path).unwrap_err(), HarnessError::CheckpointFormat { .. }));
}

#[test]
fn inspect_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = saved_checkpoint(dir.path());
    let s = cmd_inspect_checkpoint(&path).unwrap();
    assert_eq!(s.actor_layers, vec![28, 8, 4]);
    assert_eq!(s.critic_layers, vec![32, 8, 1]);
    // dense plus layer-norm gain and shift
    assert_eq!(s.actor_parameters, 28 * 8 + 8 + 8 + 8 + 8 * 4 + 4);
    assert_eq!(s.optimizer_steps, [0, 0]);
    assert_eq!(s.sha256, esdrl::harness::sha256_file(&path).unwrap());
}

#[test]
fn eval_counts_successes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.eval.episodes = 5;
    let agent = Agent::new(tiny_agent(), 1).unwrap();
    let report = cmd_eval(&cfg, &agent.actor, None, dir.path()).unwrap();
    assert_eq!(report.episodes, 5);
    assert!(report.successes <= 5);
    assert!(dir.path().join("eval.json").exists());
}

#[test]
fn es_verify_writes_the_sweep_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.verify.omegas = vec![25.0, 50.0];
    cfg.verify.horizon = 1.0;
    let report = cmd_es_verify(&cfg, dir.path(), 1000).unwrap();
    assert_eq!(report.rows.len(), 2);
    let sweep = std::fs::read_to_string(dir.path().join("es_verify.csv")).unwrap();
    assert_eq!(sweep.lines().next().unwrap(), "omega,gap");
    assert_eq!(sweep.lines().count(), 3);
    let traj = std::fs::read_to_string(dir.path().join("es_verify_omega_25.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,es_x1,es_x2,avg_x1,avg_x2,gap");
    // 10 000 integration steps at stride 1000, plus the initial sample
    assert_eq!(traj.lines().count(), 1 + 11);
}

#[test]
fn zero_gain_gives_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.verify.alpha = 0.0;
    cfg.verify.horizon = 0.5;
    let report = cmd_es_verify(&cfg, dir.path(), 100).unwrap();
    assert!(report.rows.iter().all(|r| r.gap == 0.0), "{:?}", report.rows);
}

#[test]
fn doubling_the_frequency_roughly_halves_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.verify.omegas = vec![200.0, 400.0];
    let report = cmd_es_verify(&cfg, dir.path(), 10_000).unwrap();
    let ratio = report.rows[1].gap / report.rows[0].gap;
    assert!((0.25..=0.75).contains(&ratio), "ratio {ratio}");
}

fn short_scenario() -> ExperimentConfig {
    let mut cfg = ScenarioName::PushFrictionMoving.preset();
    cfg.workspace.horizon = 300;
    cfg.scenario.seeds = 3;
    cfg
}

#[test]
fn scenario_without_actor_is_a_usage_error_unless_es_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_scenario();
    assert!(matches!(cmd_scenario(&cfg, None, None, dir.path()), Err(HarnessError::Usage(_))));
    let mut es = cfg.clone();
    es.scenario.modes = vec![Mode::EsOnly];
    let report = cmd_scenario(&es, None, None, dir.path()).unwrap();
    assert_eq!(report.episodes.len(), 3);
}

#[test]
fn scenario_outputs_are_byte_identical_on_rerun() {
    let agent = Agent::new(tiny_agent(), 2).unwrap();
    let cfg = short_scenario();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_scenario(&cfg, Some(&agent.actor), None, a.path()).unwrap();
    cmd_scenario(&cfg, Some(&agent.actor), None, b.path()).unwrap();
    let root_a = a.path().join("push_friction_moving");
    let manifest: RunManifest =
        serde_json::from_str(&std::fs::read_to_string(root_a.join("manifest.json")).unwrap()).unwrap();
    // 3 modes × 3 seeds, summary.csv, summary.json
    assert_eq!(manifest.artifacts.len(), 11);
    for art in &manifest.artifacts {
        let x = std::fs::read(root_a.join(&art.path)).unwrap();
        let y = std::fs::read(b.path().join("push_friction_moving").join(&art.path)).unwrap();
        assert_eq!(x, y, "{}", art.path);
    }
    assert_eq!(
        std::fs::read(root_a.join("manifest.json")).unwrap(),
        std::fs::read(b.path().join("push_friction_moving/manifest.json")).unwrap()
    );
}

#[test]
fn helix_preset_uses_the_table_helix() {
    let cfg = ScenarioName::PpTrack3d.preset();
    match cfg.goal {
        esdrl::sim::GoalSource::Given(GoalSpec::Helix {
            center_x,
            center_y,
            radius,
            period_xy,
            ..
        }) => {
            assert_eq!((center_x, center_y, radius, period_xy), (0.75, 0.75, 0.15, 500.0));
        }
        other => panic!("unexpected goal {other:?}"),
    }
}

#[test]
fn shipped_training_configs_load() {
    let push = ExperimentConfig::load(&configs_dir().join("train_push.toml")).unwrap();
    assert_eq!(push.task, Task::Push);
    assert_eq!(push.train.stop_at_success, Some(0.8));
    let pp = ExperimentConfig::load(&configs_dir().join("train_pick_place.toml")).unwrap();
    assert_eq!((pp.task, pp.train.epochs), (Task::PickPlace, 300));
    assert_eq!(pp.agent, DdpgConfig::default());
}
