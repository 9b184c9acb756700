//! Feed-forward baseline: the window is flattened and pushed through two
//! 64-unit ReLU layers and a linear scalar head. No dropout, no recurrence.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::models::{xavier_dense, Mode, ModelKind, SequenceModel};
use crate::nn::dense::DenseParams;
use crate::nn::linalg::Matrix;
use crate::windows::SeqWindow;

/// Width of both hidden layers.
pub const FNN_HIDDEN: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FnnParams {
    /// Flattened input length: window steps x features.
    pub input_dim: usize,
    pub hidden1: DenseParams,
    pub hidden2: DenseParams,
    pub head: DenseParams,
}

pub(crate) fn init_fnn(input_dim: usize, rng: &mut dyn RngCore) -> FnnParams {
    FnnParams {
        input_dim,
        hidden1: xavier_dense(FNN_HIDDEN, input_dim, rng),
        hidden2: xavier_dense(FNN_HIDDEN, FNN_HIDDEN, rng),
        head: xavier_dense(1, FNN_HIDDEN, rng),
    }
}

impl FnnParams {
    pub fn zeros_like(&self) -> Self {
        let z = |d: &DenseParams| DenseParams {
            weights: Matrix::zeros(d.weights.rows(), d.weights.cols()),
            bias: vec![0.0; d.bias.len()],
        };
        FnnParams {
            input_dim: self.input_dim,
            hidden1: z(&self.hidden1),
            hidden2: z(&self.hidden2),
            head: z(&self.head),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hidden1.in_dim() != self.input_dim
            || self.hidden2.in_dim() != self.hidden1.out_dim()
            || self.head.in_dim() != self.hidden2.out_dim()
            || self.head.out_dim() != 1
            || self.hidden1.bias.len() != self.hidden1.out_dim()
            || self.hidden2.bias.len() != self.hidden2.out_dim()
            || self.head.bias.len() != 1
        {
            return Err(Error::Shape("fnn layer shapes are inconsistent".into()));
        }
        Ok(())
    }
}

struct FnnCache {
    pre1: Vec<f64>,
    act1: Vec<f64>,
    pre2: Vec<f64>,
    act2: Vec<f64>,
    yhat: f64,
}

fn forward_cached(p: &FnnParams, x: &[f64]) -> FnnCache {
    let mut pre1 = p.hidden1.bias.clone();
    p.hidden1.weights.matvec_acc(x, &mut pre1);
    let act1: Vec<f64> = pre1.iter().map(|&v| v.max(0.0)).collect();
    let mut pre2 = p.hidden2.bias.clone();
    p.hidden2.weights.matvec_acc(&act1, &mut pre2);
    let act2: Vec<f64> = pre2.iter().map(|&v| v.max(0.0)).collect();
    let yhat = p.head.bias[0] + crate::nn::linalg::dot(p.head.weights.row(0), &act2);
    FnnCache {
        pre1,
        act1,
        pre2,
        act2,
        yhat,
    }
}

/// Forward pass. `mode` and `rng` are accepted for interface uniformity; the
/// baseline has no stochastic pieces.
pub fn fnn_forward(
    window: SeqWindow,
    p: &FnnParams,
    _mode: Mode,
    _rng: &mut dyn RngCore,
) -> Result<f64> {
    p.validate()?;
    if window.data.len() != p.input_dim {
        return Err(Error::Shape(format!(
            "fnn expects a flattened window of {} values, got {}x{}",
            p.input_dim, window.steps, window.features
        )));
    }
    let y = forward_cached(p, window.data).yhat;
    if !y.is_finite() {
        return Err(Error::Numeric("non-finite fnn prediction".into()));
    }
    Ok(y)
}

/// Squared-error loss and exact gradients.
pub fn fnn_backward(window: SeqWindow, target: f64, p: &FnnParams) -> Result<(f64, FnnParams)> {
    let mut grads = p.zeros_like();
    let loss = fnn_accumulate(p, window, target, &mut grads)?;
    Ok((loss, grads))
}

fn fnn_accumulate(
    p: &FnnParams,
    window: SeqWindow,
    target: f64,
    grads: &mut FnnParams,
) -> Result<f64> {
    p.validate()?;
    if window.data.len() != p.input_dim {
        return Err(Error::Shape(format!(
            "fnn expects a flattened window of {} values, got {}x{}",
            p.input_dim, window.steps, window.features
        )));
    }
    let cache = forward_cached(p, window.data);
    if !cache.yhat.is_finite() {
        return Err(Error::Numeric("non-finite fnn prediction".into()));
    }
    let loss = (cache.yhat - target) * (cache.yhat - target);
    let dy = 2.0 * (cache.yhat - target);

    grads.head.bias[0] += dy;
    grads.head.weights.add_outer(&[dy], &cache.act2);
    let mut d_act2 = vec![0.0; cache.act2.len()];
    p.head.weights.tmatvec_acc(&[dy], &mut d_act2);

    let d_pre2: Vec<f64> = d_act2
        .iter()
        .zip(&cache.pre2)
        .map(|(d, &z)| if z > 0.0 { *d } else { 0.0 })
        .collect();
    grads.hidden2.weights.add_outer(&d_pre2, &cache.act1);
    for (gb, d) in grads.hidden2.bias.iter_mut().zip(&d_pre2) {
        *gb += d;
    }
    let mut d_act1 = vec![0.0; cache.act1.len()];
    p.hidden2.weights.tmatvec_acc(&d_pre2, &mut d_act1);

    let d_pre1: Vec<f64> = d_act1
        .iter()
        .zip(&cache.pre1)
        .map(|(d, &z)| if z > 0.0 { *d } else { 0.0 })
        .collect();
    grads.hidden1.weights.add_outer(&d_pre1, window.data);
    for (gb, d) in grads.hidden1.bias.iter_mut().zip(&d_pre1) {
        *gb += d;
    }
    Ok(loss)
}

impl SequenceModel for FnnParams {
    fn kind(&self) -> ModelKind {
        ModelKind::Fnn
    }

    fn check_window(&self, window: &SeqWindow) -> Result<()> {
        if window.data.len() != self.input_dim {
            return Err(Error::Shape(format!(
                "fnn expects {} flattened values, got {}x{}",
                self.input_dim, window.steps, window.features
            )));
        }
        Ok(())
    }

    fn zeros_like(&self) -> Self {
        FnnParams::zeros_like(self)
    }

    fn predict(&self, window: SeqWindow, mode: Mode, rng: &mut dyn RngCore) -> Result<f64> {
        fnn_forward(window, self, mode, rng)
    }

    fn accumulate_grads(
        &self,
        window: SeqWindow,
        target: f64,
        _mode: Mode,
        _rng: &mut dyn RngCore,
        grads: &mut Self,
    ) -> Result<f64> {
        fnn_accumulate(self, window, target, grads)
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![
            self.hidden1.weights.as_slice(),
            self.hidden1.bias.as_slice(),
            self.hidden2.weights.as_slice(),
            self.hidden2.bias.as_slice(),
            self.head.weights.as_slice(),
            self.head.bias.as_slice(),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.hidden1.weights.as_mut_slice(),
            self.hidden1.bias.as_mut_slice(),
            self.hidden2.weights.as_mut_slice(),
            self.hidden2.bias.as_mut_slice(),
            self.head.weights.as_mut_slice(),
            self.head.bias.as_mut_slice(),
        ]
    }
}
