//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Trains the push and pick-and-place agents from the default desk preset,
//! then drives every scenario with them. Takes several minutes on one core.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use esdrl::ddpg::{deterministic_action, Agent, DdpgConfig, ReplayBuffer, Transition};
use esdrl::es::EsParams;
use esdrl::harness::{cmd_es_verify, cmd_scenario, cmd_train, ExperimentConfig, ScenarioName, ScenarioReport};
use esdrl::sim::{compute_reward, Task, ACTION_DIM, SUCCESS_BONUS, SUCCESS_TOLERANCE};
use esdrl::supervisor::{es_push_descent, run_episode, DescentSetup, Mode};
use esdrl::tensor::{gradcheck, Mlp, MlpSpec, OutputHead};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn report(id: u32, name: &str, o: &Outcome) {
    println!("criterion {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn gradients() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let depth = rng.random_range(0..=3);
        let spec = MlpSpec {
            input_dim: rng.random_range(1..=8),
            hidden_dims: (0..depth).map(|_| rng.random_range(3..=12)).collect(),
            output_dim: rng.random_range(1..=4),
            output_head: if rng.random_bool(0.5) { OutputHead::Tanh } else { OutputHead::Linear },
        };
        let mut net = Mlp::init(spec, &mut rng).unwrap();
        for s in net.param_slices_mut() {
            s.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        }
        let x: Vec<f64> = (0..net.spec().input_dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let u: Vec<f64> = (0..net.spec().output_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        worst = worst.max(gradcheck(&net, &x, &u, 1e-5, 1e-8).unwrap().max_rel_error);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-4 && secs < 60.0, format!("worst relative error {worst:.2e} over 100 checks in {secs:.1} s"))
}

fn transition(rng: &mut ChaCha8Rng, reward: f64) -> Transition {
    Transition {
        state: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
        action: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
        reward,
        next_state: std::array::from_fn(|_| rng.random_range(-1.0..1.0)),
        terminal: rng.random_bool(0.2),
    }
}

fn flat(net: &Mlp) -> Vec<f64> {
    net.param_slices().into_iter().flatten().copied().collect()
}

fn ddpg_mechanics() -> Outcome {
    let cfg = DdpgConfig {
        hidden_dims: vec![16, 16],
        ..DdpgConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let mut agent = Agent::new(cfg.clone(), 3).unwrap();
    let other = Agent::new(cfg.clone(), 4).unwrap();
    agent.actor = other.actor.clone();
    agent.critic = other.critic.clone();
    let (old_a, old_c) = (flat(&agent.target_actor), flat(&agent.target_critic));
    agent.polyak_update();
    let polyak_err = [(old_a, &agent.target_actor, &agent.actor), (old_c, &agent.target_critic, &agent.critic)]
        .into_iter()
        .flat_map(|(old, target, live)| {
            flat(target)
                .into_iter()
                .zip(old)
                .zip(flat(live))
                .map(|((t, o), l)| (t - (0.005 * l + 0.995 * o)).abs())
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max);

    let data: Vec<Transition> = (0..64)
        .map(|_| {
            let r = rng.random_range(-2.0..1.0);
            transition(&mut rng, r)
        })
        .collect();
    let refs: Vec<&Transition> = data.iter().collect();
    let y = agent.critic_target(&refs).unwrap();
    let td_err = data
        .iter()
        .zip(&y)
        .map(|(t, got)| {
            let a = agent.target_actor.predict(&t.next_state).unwrap();
            let x: Vec<f64> = t.next_state.iter().chain(&a).copied().collect();
            let q = agent.target_critic.predict(&x).unwrap()[0];
            let not_done = if t.terminal { 0.0 } else { 1.0 };
            (got - (t.reward + cfg.gamma * not_done * q)).abs()
        })
        .fold(0.0, f64::max);

    let mut buf = ReplayBuffer::new(100);
    for i in 0..350 {
        buf.push(transition(&mut rng, i as f64));
    }
    let kept: Vec<f64> = buf.iter_oldest_first().map(|t| t.reward).collect();
    let ring_ok = buf.len() == 100 && kept == (250..350).map(|i| i as f64).collect::<Vec<_>>();

    outcome(
        polyak_err <= 1e-12 && td_err <= 1e-12 && ring_ok,
        format!(
            "polyak error {polyak_err:.1e}, TD target error {td_err:.1e}, replay len {} holding {}..{}",
            buf.len(),
            kept.first().copied().unwrap_or(f64::NAN),
            kept.last().map_or(f64::NAN, |v| v + 1.0)
        ),
    )
}

fn reward_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut bonuses = 0;
    for i in 0..100_000 {
        let p = |rng: &mut ChaCha8Rng| -> [f64; 3] { std::array::from_fn(|_| rng.random_range(-0.5..1.5)) };
        let ee = p(&mut rng);
        let obj = p(&mut rng);
        // half the goals land near the object so the bonus branch is exercised
        let goal = if i % 2 == 0 {
            p(&mut rng)
        } else {
            std::array::from_fn(|k| obj[k] + rng.random_range(-0.06..0.06))
        };
        let t = compute_reward(&ee, &obj, &goal);
        let d2 = dist(&obj, &goal);
        let bonus = if d2 <= SUCCESS_TOLERANCE { SUCCESS_BONUS } else { 0.0 };
        bonuses += (bonus > 0.0) as usize;
        worst = worst.max((t.reward - (-dist(&ee, &obj) - d2 + bonus)).abs());
    }
    outcome(worst < 1e-12, format!("max deviation {worst:.1e} over 100000 triples ({bonuses} with bonus)"))
}

fn averaging(dir: &Path) -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = cmd_es_verify(&cfg, dir, 1000).unwrap();
    let gaps: Vec<String> = r.rows.iter().map(|row| format!("{}:{:.4}", row.omega, row.gap)).collect();
    let last = r.rows.last().unwrap();
    let pass = cfg.verify.omegas == [25.0, 50.0, 100.0, 200.0]
        && cfg.verify.horizon == 5.0
        && r.non_increasing()
        && last.gap < 0.1;
    outcome(pass, format!("gaps {}", gaps.join(" ")))
}

fn lyapunov() -> Outcome {
    let params = EsParams::default();
    let mut bad = Vec::new();
    for seed in 0..20 {
        let run = es_push_descent(&DescentSetup::sample(seed, 6000), &params).unwrap();
        if run.reached_at.is_none() || !run.strictly_decreasing() {
            bad.push(seed);
        }
    }
    outcome(
        bad.is_empty(),
        format!("{}/20 seeds with strictly decreasing period-averaged J until d2 <= 0.05 {bad:?}", 20 - bad.len()),
    )
}

fn train(task: Task, epochs: usize, target: f64, dir: &Path) -> (Agent, Outcome) {
    let mut cfg = ExperimentConfig {
        task,
        ..ExperimentConfig::default()
    };
    cfg.train.epochs = epochs;
    cfg.train.stop_at_success = Some(target);
    let start = Instant::now();
    let out = cmd_train(&cfg, dir, |_| {}).unwrap();
    let hit = out.report.curve.iter().find(|r| r.smoothed_success >= target);
    let best = out.report.curve.iter().map(|r| r.smoothed_success).fold(0.0, f64::max);
    let detail = match hit {
        Some(r) => format!("{task:?} smoothed {:.3} at epoch {}", r.smoothed_success, r.epoch + 1),
        None => format!("{task:?} best smoothed {best:.3} after {epochs} epochs"),
    };
    let secs = start.elapsed().as_secs_f64();
    (out.agent, outcome(hit.is_some(), format!("{detail} ({secs:.0} s)")))
}

fn scenario(name: ScenarioName, actor: &Mlp, dir: &Path) -> (ExperimentConfig, ScenarioReport) {
    let cfg = name.preset();
    let r = cmd_scenario(&cfg, Some(actor), None, dir).unwrap();
    (cfg, r)
}

fn fixed_goal(r: &ScenarioReport) -> Outcome {
    let rl = r.aggregate(Mode::RlOnly).unwrap();
    let es = r.aggregate(Mode::EsOnly).unwrap();
    let hy = r.aggregate(Mode::Hybrid).unwrap();
    let es_failures = es.episodes - (es.success_rate * es.episodes as f64).round() as usize;
    let pass = hy.success_rate >= rl.success_rate + 0.3
        && es.success_rate <= 0.1
        && 2 * es.left_workspace >= es_failures;
    outcome(
        pass,
        format!(
            "success hybrid {:.2} rl_only {:.2} es_only {:.2}; es_only left workspace {}/{} failures",
            hy.success_rate, rl.success_rate, es.success_rate, es.left_workspace, es_failures
        ),
    )
}

fn moving_goal(r: &ScenarioReport) -> Outcome {
    let rl = r.aggregate(Mode::RlOnly).unwrap().mean_tail_tracking_error;
    let hy = r.aggregate(Mode::Hybrid).unwrap().mean_tail_tracking_error;
    outcome(
        hy <= 0.1 && rl >= 2.0 * hy,
        format!("final-quarter mean d2 hybrid {hy:.3} rl_only {rl:.3}"),
    )
}

fn helix(r: &ScenarioReport) -> Outcome {
    let rl = r.aggregate(Mode::RlOnly).unwrap().mean_tracking_error;
    let hy = r.aggregate(Mode::Hybrid).unwrap().mean_tracking_error;
    outcome(hy <= 0.5 * rl, format!("mean 3-D error hybrid {hy:.3} rl_only {rl:.3} (ratio {:.2})", hy / rl))
}

/// Re-rolls every hybrid episode and checks the switch contracts on its log.
fn switching(runs: &[(ExperimentConfig, &Mlp)]) -> Outcome {
    let (mut episodes, mut switched, mut violations) = (0, 0, Vec::new());
    for (cfg, actor) in runs {
        let scene = cfg.scene().unwrap();
        let opts = cfg.run_options();
        for i in 0..cfg.scenario.seeds {
            let seed = cfg.seed + i;
            let log = run_episode(&scene, seed, Some(actor), &cfg.es, Mode::Hybrid, &opts).unwrap();
            episodes += 1;
            let tag = format!("{}#{seed}", cfg.scenario.name);
            if log.records.windows(2).any(|w| w[1].beta > w[0].beta) {
                violations.push(format!("{tag} beta rose"));
            }
            let t_c = log.summary.switch_step.map_or(log.records.len(), |t| t as usize);
            let (mut state, mut result) = scene.reset(seed);
            for r in &log.records[..t_c.min(log.records.len())] {
                let a = deterministic_action(actor, &result.agent_state()).unwrap();
                if a != r.action {
                    violations.push(format!("{tag} pre-switch action differs at {}", r.t));
                    break;
                }
                (state, result) = scene.step(&state, &a);
            }
            if let Some(first) = log.records.get(t_c) {
                switched += 1;
                if log.records[t_c..].iter().any(|r| r.action[ACTION_DIM - 1] != first.action[ACTION_DIM - 1]) {
                    violations.push(format!("{tag} gripper moved after the switch"));
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("{episodes} hybrid episodes, {switched} switched, violations {violations:?}"),
    )
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn reproducible(actor: &Mlp) -> Outcome {
    let cfg = ScenarioName::PushFrictionFixed.preset();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_scenario(&cfg, Some(actor), None, a.path()).unwrap();
    cmd_scenario(&cfg, Some(actor), None, b.path()).unwrap();
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    let csvs = ta.keys().filter(|k| k.ends_with(".csv")).count();
    let differing: Vec<&String> = ta.keys().filter(|k| tb.get(*k) != ta.get(*k)).collect();
    outcome(
        !ta.is_empty() && ta.len() == tb.len() && differing.is_empty(),
        format!("{} files ({csvs} CSVs) compared, {} differ", ta.len(), differing.len()),
    )
}

fn main() -> ExitCode {
    let work = tempfile::tempdir().unwrap();
    let sub = |name: &str| {
        let p = work.path().join(name);
        std::fs::create_dir_all(&p).unwrap();
        p
    };
    let mut results = Vec::new();
    let mut record = |id: u32, name: &str, o: Outcome| {
        report(id, name, &o);
        results.push(o.pass);
    };

    record(1, "gradient check", gradients());
    record(2, "DDPG mechanics", ddpg_mechanics());
    record(3, "reward identity", reward_identity());
    record(4, "averaging gap", averaging(&sub("verify")));
    record(5, "ES descent", lyapunov());

    let (push, o_push) = train(Task::Push, 150, 0.8, &sub("train_push"));
    let (pp, o_pp) = train(Task::PickPlace, 300, 0.6, &sub("train_pp"));
    let both = o_push.pass && o_pp.pass;
    record(6, "learning", outcome(both, format!("{}; {}", o_push.detail, o_pp.detail)));

    let scenarios = sub("scenarios");
    let (fixed_cfg, fixed) = scenario(ScenarioName::PushFrictionFixed, &push.actor, &scenarios);
    record(7, "fixed goal under friction", fixed_goal(&fixed));
    let (moving_cfg, moving) = scenario(ScenarioName::PushFrictionMoving, &push.actor, &scenarios);
    record(8, "moving goal under friction", moving_goal(&moving));
    let (helix_cfg, helix_report) = scenario(ScenarioName::PpTrack3d, &pp.actor, &scenarios);
    record(9, "3-D helix tracking", helix(&helix_report));

    record(
        10,
        "switch contracts",
        switching(&[(fixed_cfg, &push.actor), (moving_cfg, &push.actor), (helix_cfg, &pp.actor)]),
    );
    record(11, "byte-identical rerun", reproducible(&push.actor));

    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
