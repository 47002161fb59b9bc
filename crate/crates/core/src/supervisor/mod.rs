//! Contact-triggered switch from the frozen actor to bounded ES.
//!
//! `β` starts at 1 (actor in control). The first step whose observation
//! carries the contact flag sets `β = 0` for the rest of the episode; ES is
//! warm-started from the actor's action at that step, which is also the
//! action executed there. From the next step on ES runs with its phase
//! counted from the switch.

mod descent;
mod log;

pub use descent::{es_push_descent, DescentRun, DescentSetup};
pub use log::{EpisodeLog, EpisodeSummary, FailureKind, StepRecord, CSV_HEADER};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ddpg::{deterministic_action, DdpgError};
use crate::es::{es_action, es_init, EsError, EsParams, EsState};
use crate::sim::{Action, Scene, StepResult, ACTION_DIM, SUCCESS_TOLERANCE};
use crate::tensor::Mlp;

#[derive(Debug, Error)]
pub enum SupervisorError {
    #[error(transparent)]
    Es(#[from] EsError),
    #[error(transparent)]
    Actor(#[from] DdpgError),
    #[error("{0} mode needs an actor")]
    MissingActor(Mode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RlOnly,
    EsOnly,
    Hybrid,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::RlOnly, Mode::EsOnly, Mode::Hybrid];

    pub fn name(self) -> &'static str {
        match self {
            Mode::RlOnly => "rl_only",
            Mode::EsOnly => "es_only",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode {s:?}; expected rl_only, es_only or hybrid"))
    }
}

/// Switching state for one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub beta: u8,
    pub t_c: Option<u64>,
    pub es_state: Option<EsState>,
    pub mode_history: Vec<u8>,
}

impl Default for HybridState {
    fn default() -> Self {
        Self::new()
    }
}

impl HybridState {
    pub fn new() -> Self {
        Self {
            beta: 1,
            t_c: None,
            es_state: None,
            mode_history: Vec::new(),
        }
    }

    /// ES from the first step with the given warm start.
    pub fn es_from_start(warm_start: &Action) -> Result<Self, EsError> {
        Ok(Self {
            beta: 0,
            t_c: Some(0),
            es_state: Some(es_init(warm_start)?),
            mode_history: Vec::new(),
        })
    }
}

/// Single-switch law: on the first contact, `β ← 0`, `t_c ← t` and ES is
/// initialised from `last_rl_action`. Later calls change nothing.
pub fn update_beta(h: &mut HybridState, contact: bool, t: u64, last_rl_action: &Action) -> Result<(), EsError> {
    if h.beta == 1 && contact {
        h.es_state = Some(es_init(last_rl_action)?);
        h.beta = 0;
        h.t_c = Some(t);
    }
    Ok(())
}

/// `β·a_rl + (1 − β)·a_es` for binary `β`, i.e. an exact selection.
pub fn hybrid_action(h: &HybridState, a_rl: &Action, a_es: &Action) -> Action {
    if h.beta == 1 {
        *a_rl
    } else {
        *a_es
    }
}

/// ES cost fed back after contact: end-effector-to-object plus
/// object-to-goal distance. While grasped the first term vanishes.
pub fn es_cost(result: &StepResult) -> f64 {
    result.d1 + result.d2
}

/// Episode length and how success is judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    pub horizon: usize,
    /// Trailing fraction of the episode used for moving-goal scoring.
    pub tracking_window: f64,
    /// Moving-goal success threshold on the windowed mean of `d₂`.
    pub tracking_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            horizon: 50,
            tracking_window: 0.25,
            tracking_threshold: 2.0 * SUCCESS_TOLERANCE,
        }
    }
}

/// Next ES command, emitting the stored warm start on the switch step.
fn next_es_action(params: &EsParams, es: &mut EsState, cost: f64) -> Result<Action, EsError> {
    if es.t == 0 {
        es.t = 1;
        let mut a = es.warm_start;
        a[ACTION_DIM - 1] = es.frozen_gripper;
        return Ok(a);
    }
    es_action(params, es, cost)
}

/// Rolls out one episode of `mode` from `scene.reset(seed)`.
///
/// The actor is queried noise-free at every step in `rl_only`, and at every
/// step before the switch in `hybrid`. Fixed-goal episodes stop at the first
/// success; moving-goal episodes always run the full horizon.
pub fn run_episode(
    scene: &Scene,
    seed: u64,
    actor: Option<&Mlp>,
    es_params: &EsParams,
    mode: Mode,
    opts: &RunOptions,
) -> Result<EpisodeLog, SupervisorError> {
    if mode != Mode::EsOnly && actor.is_none() {
        return Err(SupervisorError::MissingActor(mode));
    }
    let (mut state, mut result) = scene.reset(seed);
    let moving = state.goal.is_moving();
    let mut h = match mode {
        Mode::EsOnly => HybridState::es_from_start(&[0.0; ACTION_DIM])?,
        _ => HybridState::new(),
    };
    let mut records = Vec::with_capacity(opts.horizon);
    for t in 0..opts.horizon as u64 {
        let contact = result.contact;
        let cost = es_cost(&result);
        let a_rl = match (mode, h.beta, actor) {
            (Mode::EsOnly, _, _) | (_, 0, _) => None,
            (_, _, Some(net)) => Some(deterministic_action(net, &result.agent_state())?),
            (_, _, None) => unreachable!("actor presence checked above"),
        };
        if mode == Mode::Hybrid {
            if let Some(a) = &a_rl {
                update_beta(&mut h, contact, t, a)?;
            }
        }
        let a_rl = a_rl.unwrap_or([0.0; ACTION_DIM]);
        let a_es = match h.es_state.as_mut() {
            Some(es) if h.beta == 0 => next_es_action(es_params, es, cost)?,
            _ => [0.0; ACTION_DIM],
        };
        let action = hybrid_action(&h, &a_rl, &a_es);
        h.mode_history.push(h.beta);
        let (next, next_result) = scene.step(&state, &action);
        state = next;
        result = next_result;
        records.push(StepRecord {
            t,
            ee: state.ee_pos,
            obj: state.obj_pos,
            goal: result.goal,
            action,
            beta: h.beta,
            cost,
            reward: result.reward,
            contact: result.contact,
            success: result.success,
            d2: result.d2,
        });
        if result.success && !moving {
            break;
        }
    }
    let summary = EpisodeSummary::from_records(&records, mode, seed, moving, state.off_table, h.t_c, opts);
    Ok(EpisodeLog { records, summary })
}
