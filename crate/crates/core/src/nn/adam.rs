//! Adam optimizer with bias correction, operating on flat parameter blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adam hyperparameters; defaults follow the reference formulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamHyper {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamHyper {
            learning_rate,
            ..AdamHyper::default()
        }
    }
}

/// First/second moment accumulators shaped like the parameter blocks.
#[derive(Debug, Clone)]
pub struct AdamState {
    hyper: AdamHyper,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
    step: u64,
}

impl AdamState {
    /// `block_lengths` lists the flat length of each parameter block, in the
    /// order the blocks will be passed to [`AdamState::step`].
    pub fn new(block_lengths: &[usize], hyper: AdamHyper) -> Self {
        AdamState {
            hyper,
            first_moment: block_lengths.iter().map(|&n| vec![0.0; n]).collect(),
            second_moment: block_lengths.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn hyper(&self) -> AdamHyper {
        self.hyper
    }

    /// One Adam update:
    /// m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², θ ← θ − lr·m̂/(√v̂ + ε).
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != self.first_moment.len() {
            return Err(Error::Shape(format!(
                "adam: expected {} blocks, got {} params / {} grads",
                self.first_moment.len(),
                params.len(),
                grads.len()
            )));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != self.first_moment[i].len() || g.len() != self.first_moment[i].len() {
                return Err(Error::Shape(format!(
                    "adam: block {i} has length {} / grad {}, state expects {}",
                    p.len(),
                    g.len(),
                    self.first_moment[i].len()
                )));
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let AdamHyper {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.hyper;
        let bias1 = 1.0 - beta1.powi(t);
        let bias2 = 1.0 - beta2.powi(t);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(&mut self.second_moment))
        {
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
                v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
                let m_hat = m[i] / bias1;
                let v_hat = v[i] / bias2;
                p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}
