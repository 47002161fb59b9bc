use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Agent, ReplayBuffer, Result, Transition};
use crate::sim::Environment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub episodes_per_epoch: usize,
    /// Weight of the previous value in the success-rate moving average.
    pub smoothing: f64,
    /// Stop once the smoothed success rate reaches this value.
    pub stop_at_success: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 150,
            episodes_per_epoch: 100,
            smoothing: 0.9,
            stop_at_success: None,
        }
    }
}

impl TrainConfig {
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.episodes_per_epoch == 0 {
            errors.push("train.episodes_per_epoch: must be positive".into());
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            errors.push(format!("train.smoothing: must lie in [0, 1), got {}", self.smoothing));
        }
        if let Some(s) = self.stop_at_success {
            if !(0.0..=1.0).contains(&s) {
                errors.push(format!("train.stop_at_success: must lie in [0, 1], got {s}"));
            }
        }
        errors
    }
}

/// One line of the learning curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub success_rate: f64,
    pub smoothed_success: f64,
    pub mean_return: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub curve: Vec<EpochRecord>,
    pub env_steps: u64,
    pub updates: u64,
}

/// Bias-corrected trailing exponential moving average.
pub fn smooth_curve(raw: &[f64], weight: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut norm = 0.0;
    raw.iter()
        .map(|&x| {
            acc = weight * acc + (1.0 - weight) * x;
            norm = weight * norm + (1.0 - weight);
            acc / norm
        })
        .collect()
}

/// Runs `epochs × episodes_per_epoch` exploratory episodes, updating the
/// agent every `update_every` steps once the buffer holds `warmup`
/// transitions. Episodes end on success or at the horizon. `on_epoch` sees
/// each curve record as it is produced.
pub fn train<E, F>(
    env: &mut E,
    agent: &mut Agent,
    replay: &mut ReplayBuffer,
    cfg: &TrainConfig,
    seed: u64,
    mut on_epoch: F,
) -> Result<TrainReport>
where
    E: Environment,
    F: FnMut(&EpochRecord),
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curve = Vec::with_capacity(cfg.epochs);
    let mut smoothed_acc = 0.0;
    let mut smoothed_norm = 0.0;
    let mut env_steps = 0u64;
    let mut updates = 0u64;
    let noise = agent.config.noise_std;
    let random_steps = agent.config.random_action_steps as u64;
    let (batch_size, warmup, every) = (agent.config.batch_size, agent.config.warmup, agent.config.update_every);
    for epoch in 0..cfg.epochs {
        let mut successes = 0usize;
        let mut return_sum = 0.0;
        for _ in 0..cfg.episodes_per_epoch {
            let mut result = env.reset(rng.next_u64());
            let mut state = result.agent_state();
            let mut episode_return = 0.0;
            let mut solved = false;
            for _ in 0..env.horizon() {
                let action = if env_steps < random_steps {
                    std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
                } else {
                    agent.select_action(&state, noise, &mut rng)?
                };
                result = env.step(&action);
                let next_state = result.agent_state();
                episode_return += result.reward;
                replay.push(Transition {
                    state,
                    action,
                    reward: result.reward,
                    next_state,
                    terminal: result.success,
                });
                state = next_state;
                env_steps += 1;
                if replay.len() >= warmup && env_steps % every as u64 == 0 {
                    let batch = replay.sample(batch_size, &mut rng);
                    agent.update(&batch)?;
                    updates += 1;
                }
                if result.success {
                    solved = true;
                    break;
                }
            }
            successes += solved as usize;
            return_sum += episode_return;
        }
        let n = cfg.episodes_per_epoch as f64;
        let rate = successes as f64 / n;
        smoothed_acc = cfg.smoothing * smoothed_acc + (1.0 - cfg.smoothing) * rate;
        smoothed_norm = cfg.smoothing * smoothed_norm + (1.0 - cfg.smoothing);
        let record = EpochRecord {
            epoch,
            success_rate: rate,
            smoothed_success: smoothed_acc / smoothed_norm,
            mean_return: return_sum / n,
        };
        on_epoch(&record);
        let stop = cfg.stop_at_success.is_some_and(|s| record.smoothed_success >= s);
        curve.push(record);
        if stop {
            break;
        }
    }
    Ok(TrainReport {
        curve,
        env_steps,
        updates,
    })
}
