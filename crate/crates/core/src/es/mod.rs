//! Bounded extremum seeking.
//!
//! Each adapted channel follows `Δt·√(α·ω_i)·cos(ω_i·τ + k·J)` with
//! `τ = Δt·(steps since handoff)` and `ω_i = r_i·ω`. Because `|cos| ≤ 1`
//! the command magnitude is bounded by `Δt·√(α·ω_i)` regardless of the cost
//! signal. On average the dithered system descends the cost like
//! `ẋ = −(kα/2)·∇J`; [`averaging`] integrates that averaged flow and the
//! undithered-in-time ES system so the two can be compared.

pub mod averaging;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{Action, ACTION_DIM};

/// Number of Cartesian channels driven by the dither; the gripper is held.
pub const ES_CHANNELS: usize = ACTION_DIM - 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EsError {
    #[error("invalid ES parameters: {0}")]
    InvalidParams(String),
    #[error("warm-start action {0:?} lies outside [-1, 1]^4")]
    ActionOutOfBox(Action),
    #[error("non-finite cost signal {0}")]
    NonFiniteCost(f64),
    #[error("non-finite gradient at t = {t}: {detail}")]
    NonFiniteGradient { t: f64, detail: String },
    #[error("trajectory length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsParams {
    /// Dither amplitude `α`.
    pub alpha: f64,
    /// Feedback gain `k` on the cost.
    pub k: f64,
    /// Base frequency `ω` in rad per unit of `τ`.
    pub omega: f64,
    /// Per-channel frequency ratios `r_i`, pairwise distinct.
    pub ratios: Vec<f64>,
    /// Step size `Δt`.
    pub dt: f64,
}

impl Default for EsParams {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            k: 8.0,
            omega: 5.0,
            ratios: vec![1.0, 1.75, 2.9],
            dt: 0.1,
        }
    }
}

impl EsParams {
    pub fn new(alpha: f64, k: f64, omega: f64, ratios: Vec<f64>, dt: f64) -> Result<Self, EsError> {
        let params = Self {
            alpha,
            k,
            omega,
            ratios,
            dt,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), EsError> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(EsError::InvalidParams(errors.join("; ")))
        }
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        for (name, v) in [("alpha", self.alpha), ("k", self.k), ("omega", self.omega), ("dt", self.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("es.{name}: must be positive, got {v}"));
            }
        }
        if self.ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            errors.push("es.ratios: every ratio must be positive".into());
        }
        let mut sorted = self.ratios.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] >= w[1]) {
            errors.push(format!("es.ratios: must be pairwise distinct, got {:?}", self.ratios));
        }
        errors
    }

    /// `ω_i = r_i·ω`.
    pub fn frequency(&self, channel: usize) -> f64 {
        self.ratios[channel] * self.omega
    }

    /// Largest magnitude channel `channel` can ever command, before clipping.
    pub fn amplitude(&self, channel: usize) -> f64 {
        self.dt * (self.alpha * self.frequency(channel)).sqrt()
    }

    /// Number of steps in one period of the slowest dither channel.
    pub fn dither_period_steps(&self) -> usize {
        let slowest = self.ratios.iter().copied().fold(f64::INFINITY, f64::min) * self.omega;
        (std::f64::consts::TAU / (slowest * self.dt)).round().max(1.0) as usize
    }
}

/// Per-episode ES memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsState {
    /// Steps since handoff.
    pub t: u64,
    pub frozen_gripper: f64,
    pub warm_start: Action,
}

/// Starts ES from the action in force at handoff.
pub fn es_init(handoff_action: &Action) -> Result<EsState, EsError> {
    if handoff_action.iter().any(|a| !(-1.0..=1.0).contains(a)) {
        return Err(EsError::ActionOutOfBox(*handoff_action));
    }
    Ok(EsState {
        t: 0,
        frozen_gripper: handoff_action[ACTION_DIM - 1],
        warm_start: *handoff_action,
    })
}

/// Bounded ES command for the current step; advances the step counter.
pub fn es_action(params: &EsParams, state: &mut EsState, cost: f64) -> Result<Action, EsError> {
    if !cost.is_finite() {
        return Err(EsError::NonFiniteCost(cost));
    }
    let tau = state.t as f64 * params.dt;
    let mut action = [0.0; ACTION_DIM];
    for (i, a) in action.iter_mut().take(ES_CHANNELS).enumerate() {
        let w = params.frequency(i);
        *a = (params.amplitude(i) * (w * tau + params.k * cost).cos()).clamp(-1.0, 1.0);
    }
    action[ACTION_DIM - 1] = state.frozen_gripper;
    state.t += 1;
    Ok(action)
}

/// Means over consecutive non-overlapping windows of `period` samples; a
/// trailing partial window is dropped.
pub fn period_means(xs: &[f64], period: usize) -> Vec<f64> {
    let period = period.max(1);
    xs.chunks_exact(period).map(|c| c.iter().sum::<f64>() / period as f64).collect()
}
