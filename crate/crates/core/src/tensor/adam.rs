use serde::{Deserialize, Serialize};

use super::mlp::{GradientSet, Mlp};
use super::{Result, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam moment accumulators for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: AdamConfig,
    pub(crate) first: Vec<Vec<f64>>,
    pub(crate) second: Vec<Vec<f64>>,
    pub(crate) step: u64,
}

impl OptimizerState {
    pub fn new(net: &Mlp, config: AdamConfig) -> Self {
        let zeros: Vec<Vec<f64>> = net.param_slices().iter().map(|s| vec![0.0; s.len()]).collect();
        Self {
            config,
            first: zeros.clone(),
            second: zeros,
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn first_moments(&self) -> &[Vec<f64>] {
        &self.first
    }

    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.second
    }

    /// One bias-corrected Adam descent step. Rejects non-finite gradients
    /// before touching any state.
    pub fn step(&mut self, net: &mut Mlp, grads: &GradientSet) -> Result<()> {
        let shapes_match = grads.tensors().len() == self.first.len()
            && grads.tensors().iter().zip(&self.first).all(|(g, m)| g.len() == m.len());
        if !shapes_match {
            return Err(TensorError::DimensionMismatch {
                expected: self.first.iter().map(Vec::len).sum(),
                got: grads.tensors().iter().map(Vec::len).sum(),
            });
        }
        if let Some(idx) = grads.tensors().iter().position(|t| t.iter().any(|g| !g.is_finite())) {
            return Err(TensorError::NonFinite(net.param_names()[idx].clone()));
        }
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for (((param, g), m), v) in net
            .param_slices_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(self.first.iter_mut())
            .zip(self.second.iter_mut())
        {
            for i in 0..param.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                param[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}
