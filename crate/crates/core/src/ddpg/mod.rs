//! Goal-conditioned DDPG: actor, critic, their Polyak-averaged targets, a
//! replay ring and the training loop.

mod checkpoint;
mod replay;
mod train;

pub use checkpoint::{AgentCheckpoint, AGENT_FORMAT, AGENT_FORMAT_VERSION};
pub use replay::{ReplayBuffer, Transition};
pub use train::{smooth_curve, train, EpochRecord, TrainConfig, TrainReport};

use ndarray::{s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{Action, ACTION_DIM, STATE_DIM};
use crate::tensor::{AdamConfig, Mlp, MlpSpec, OptimizerState, OutputHead, TensorError};

#[derive(Debug, Error)]
pub enum DdpgError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("training diverged: {0}")]
    Divergence(String),
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
    #[error("empty batch")]
    EmptyBatch,
}

pub type Result<T> = std::result::Result<T, DdpgError>;

/// Agent hyperparameters. Defaults are the desk-scale preset; see
/// [`DdpgConfig::paper_scale`] for the full-size one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    pub noise_std: f64,
    /// Transitions collected before the first update.
    pub warmup: usize,
    /// Environment steps between consecutive updates.
    pub update_every: usize,
    /// Leading environment steps that take uniform random actions instead
    /// of the policy's.
    pub random_action_steps: usize,
    pub hidden_dims: Vec<usize>,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        Self {
            actor_lr: 1e-3,
            critic_lr: 1e-3,
            buffer_capacity: 200_000,
            batch_size: 128,
            noise_std: 0.2,
            random_action_steps: 5000,
            hidden_dims: vec![64, 64],
            ..Self::paper_scale()
        }
    }
}

impl DdpgConfig {
    pub fn paper_scale() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.005,
            actor_lr: 1e-4,
            critic_lr: 1e-4,
            buffer_capacity: 1_000_000,
            batch_size: 256,
            noise_std: 0.1,
            warmup: 1000,
            update_every: 1,
            random_action_steps: 0,
            hidden_dims: vec![256, 256],
        }
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if !(0.0..1.0).contains(&self.gamma) {
            errors.push(format!("agent.gamma: must lie in [0, 1), got {}", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            errors.push(format!("agent.tau: must lie in (0, 1), got {}", self.tau));
        }
        for (name, v) in [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr)] {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("agent.{name}: must be positive, got {v}"));
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            errors.push(format!("agent.noise_std: must be non-negative, got {}", self.noise_std));
        }
        for (name, v) in [
            ("buffer_capacity", self.buffer_capacity),
            ("batch_size", self.batch_size),
            ("update_every", self.update_every),
        ] {
            if v == 0 {
                errors.push(format!("agent.{name}: must be positive"));
            }
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            errors.push(format!("agent.hidden_dims: need at least one positive width, got {:?}", self.hidden_dims));
        }
        errors
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(DdpgError::InvalidConfig(errors.join("; ")))
        }
    }

    fn actor_spec(&self) -> MlpSpec {
        MlpSpec {
            hidden_dims: self.hidden_dims.clone(),
            ..MlpSpec::actor(STATE_DIM, ACTION_DIM)
        }
    }

    fn critic_spec(&self) -> MlpSpec {
        MlpSpec {
            hidden_dims: self.hidden_dims.clone(),
            ..MlpSpec::critic(STATE_DIM, ACTION_DIM)
        }
    }
}

/// Live and target networks together with their optimizers.
#[derive(Debug, Clone)]
pub struct Agent {
    pub config: DdpgConfig,
    pub actor: Mlp,
    pub critic: Mlp,
    pub target_actor: Mlp,
    pub target_critic: Mlp,
    pub actor_opt: OptimizerState,
    pub critic_opt: OptimizerState,
}

fn stack_states<'a>(rows: impl ExactSizeIterator<Item = &'a [f64; STATE_DIM]>) -> Array2<f64> {
    let n = rows.len();
    let mut m = Array2::zeros((n, STATE_DIM));
    for (i, r) in rows.enumerate() {
        m.row_mut(i).as_slice_mut().expect("contiguous row").copy_from_slice(r);
    }
    m
}

fn critic_input(states: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    let mut x = Array2::zeros((states.nrows(), STATE_DIM + ACTION_DIM));
    x.slice_mut(s![.., ..STATE_DIM]).assign(states);
    x.slice_mut(s![.., STATE_DIM..]).assign(actions);
    x
}

impl Agent {
    /// Fresh agent; targets start as exact copies of the live networks.
    pub fn new(config: DdpgConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let actor = Mlp::init(config.actor_spec(), &mut rng)?;
        let critic = Mlp::init(config.critic_spec(), &mut rng)?;
        Self::from_networks(config, actor, critic)
    }

    /// Wraps given live networks; targets are copies, optimizers are fresh.
    pub fn from_networks(config: DdpgConfig, actor: Mlp, critic: Mlp) -> Result<Self> {
        config.validate()?;
        let a = actor.spec();
        let c = critic.spec();
        if a.output_head != OutputHead::Tanh
            || a.input_dim != STATE_DIM
            || a.output_dim != ACTION_DIM
            || c.input_dim != a.input_dim + a.output_dim || c.output_dim != 1 {
            return Err(DdpgError::InvalidConfig(
                "critic must map (state, action) to a scalar and the actor must have a tanh head".into(),
            ));
        }
        let actor_opt = OptimizerState::new(&actor, AdamConfig::with_learning_rate(config.actor_lr));
        let critic_opt = OptimizerState::new(&critic, AdamConfig::with_learning_rate(config.critic_lr));
        Ok(Self {
            target_actor: actor.clone(),
            target_critic: critic.clone(),
            actor,
            critic,
            actor_opt,
            critic_opt,
            config,
        })
    }

    /// `clip(μ(s) + N(0, σ²), −1, 1)`; `σ = 0` gives the actor output as is.
    pub fn select_action<R: Rng + ?Sized>(&self, state: &[f64; STATE_DIM], noise_std: f64, rng: &mut R) -> Result<Action> {
        let mut a = deterministic_action(&self.actor, state)?;
        if noise_std > 0.0 {
            let normal = Normal::new(0.0, noise_std).map_err(|e| DdpgError::InvalidConfig(e.to_string()))?;
            for v in &mut a {
                *v = (*v + normal.sample(rng)).clamp(-1.0, 1.0);
            }
        }
        Ok(a)
    }

    /// TD targets `y = r + γ(1 − d)·Q′(s′, μ′(s′))` from the target networks.
    pub fn critic_target(&self, batch: &[&Transition]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(DdpgError::EmptyBatch);
        }
        let next = stack_states(batch.iter().map(|t| &t.next_state));
        let next_actions = self.target_actor.predict_batch(next.view())?;
        let q_next = self.target_critic.predict_batch(critic_input(&next, &next_actions).view())?;
        Ok(batch
            .iter()
            .zip(q_next.column(0))
            .map(|(t, &q)| {
                let live = if t.terminal { 0.0 } else { 1.0 };
                t.reward + self.config.gamma * live * q
            })
            .collect())
    }

    /// One Adam step on the mean squared TD error; returns the pre-step loss.
    pub fn critic_update(&mut self, batch: &[&Transition]) -> Result<f64> {
        let targets = self.critic_target(batch)?;
        let states = stack_states(batch.iter().map(|t| &t.state));
        let mut actions = Array2::zeros((batch.len(), ACTION_DIM));
        for (i, t) in batch.iter().enumerate() {
            actions.row_mut(i).as_slice_mut().expect("contiguous row").copy_from_slice(&t.action);
        }
        let (q, cache) = self.critic.forward_batch(critic_input(&states, &actions).view())?;
        let n = batch.len() as f64;
        let mut upstream = Array2::zeros((batch.len(), 1));
        let mut loss = 0.0;
        for (i, &y) in targets.iter().enumerate() {
            let err = q[[i, 0]] - y;
            loss += err * err / n;
            upstream[[i, 0]] = 2.0 * err / n;
        }
        if !loss.is_finite() {
            return Err(DdpgError::Divergence(format!("critic loss is {loss}")));
        }
        let (grads, _) = self.critic.backward_batch(&cache, upstream.view())?;
        self.critic_opt.step(&mut self.critic, &grads).map_err(divergence)?;
        Ok(loss)
    }

    /// One ascent step on `mean Q(s, μ(s))` with the critic held fixed;
    /// returns the pre-step objective.
    pub fn actor_update(&mut self, batch: &[&Transition]) -> Result<f64> {
        if batch.is_empty() {
            return Err(DdpgError::EmptyBatch);
        }
        let states = stack_states(batch.iter().map(|t| &t.state));
        let (actions, actor_cache) = self.actor.forward_batch(states.view())?;
        let (q, critic_cache) = self.critic.forward_batch(critic_input(&states, &actions).view())?;
        let n = batch.len() as f64;
        let objective = q.sum() / n;
        if !objective.is_finite() {
            return Err(DdpgError::Divergence(format!("actor objective is {objective}")));
        }
        // minimise −mean Q
        let upstream = Array2::from_elem((batch.len(), 1), -1.0 / n);
        let (_, dinput) = self.critic.backward_batch(&critic_cache, upstream.view())?;
        let da = dinput.slice(s![.., STATE_DIM..]).to_owned();
        let (grads, _) = self.actor.backward_batch(&actor_cache, da.view())?;
        self.actor_opt.step(&mut self.actor, &grads).map_err(divergence)?;
        Ok(objective)
    }

    /// `θ′ ← τθ + (1 − τ)θ′` for both target networks.
    pub fn polyak_update(&mut self) {
        let tau = self.config.tau;
        polyak(&mut self.target_actor, &self.actor, tau);
        polyak(&mut self.target_critic, &self.critic, tau);
    }

    /// Critic step, actor step, then target step. Returns `(critic loss, actor objective)`.
    pub fn update(&mut self, batch: &[&Transition]) -> Result<(f64, f64)> {
        let loss = self.critic_update(batch)?;
        let objective = self.actor_update(batch)?;
        self.polyak_update();
        Ok((loss, objective))
    }
}

fn divergence(e: TensorError) -> DdpgError {
    match e {
        TensorError::NonFinite(msg) => DdpgError::Divergence(msg),
        other => DdpgError::Tensor(other),
    }
}

/// Elementwise `target ← τ·source + (1 − τ)·target`.
pub fn polyak(target: &mut Mlp, source: &Mlp, tau: f64) {
    for (dst, src) in target.param_slices_mut().into_iter().zip(source.param_slices()) {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = tau * s + (1.0 - tau) * *d;
        }
    }
}

/// Frozen-policy action `μ(s)`.
pub fn deterministic_action(actor: &Mlp, state: &[f64; STATE_DIM]) -> Result<Action> {
    let out = actor.predict(state)?;
    let mut a = [0.0; ACTION_DIM];
    a.copy_from_slice(&out);
    Ok(a)
}
