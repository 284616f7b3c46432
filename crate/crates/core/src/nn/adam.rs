use serde::{Deserialize, Serialize};

use super::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Decoupled weight decay, applied as `p -= lr · wd · p`.
    pub weight_decay: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 5e-4,
        }
    }
}

/// Adam moment buffers over the flattened parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub config: AdamConfig,
    first: Vec<f64>,
    second: Vec<f64>,
    step: u64,
}

impl TrainState {
    pub fn new(config: AdamConfig, num_scalars: usize) -> Self {
        Self {
            config,
            first: vec![0.0; num_scalars],
            second: vec![0.0; num_scalars],
            step: 0,
        }
    }

    pub fn for_params(config: AdamConfig, params: &ModelParams) -> Self {
        Self::new(config, params.num_scalars())
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn update(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.first.len(), "parameter buffer shape");
        assert_eq!(grads.len(), self.first.len(), "gradient buffer shape");
        let AdamConfig {
            learning_rate: lr,
            beta1,
            beta2,
            eps,
            weight_decay,
        } = self.config;
        self.step += 1;
        let bias1 = 1.0 - beta1.powi(self.step as i32);
        let bias2 = 1.0 - beta2.powi(self.step as i32);
        for k in 0..params.len() {
            let g = grads[k];
            self.first[k] = beta1 * self.first[k] + (1.0 - beta1) * g;
            self.second[k] = beta2 * self.second[k] + (1.0 - beta2) * g * g;
            let m_hat = self.first[k] / bias1;
            let v_hat = self.second[k] / bias2;
            params[k] -= lr * (m_hat / (v_hat.sqrt() + eps) + weight_decay * params[k]);
        }
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        let mut flat = params.flatten();
        self.update(&mut flat, &grads.flatten());
        params.assign(&flat);
    }
}
