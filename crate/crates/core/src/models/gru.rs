//! GRU forecaster: update/reset gates and a candidate state, no cell vector.
//!
//! Uses the original formulation h' = (1-z).h + z.n, where z is the update
//! gate and n the candidate state computed from the reset-gated hidden state.

#![allow(clippy::needless_range_loop)] // indexed loops across parallel state slices

use rand::RngCore;

use crate::error::{Error, Result};
use crate::models::{xavier_dense, xavier_matrix, Mode, ModelKind, SequenceModel};
use crate::nn::activation::{sigmoid, sigmoid_deriv_from_output, tanh, tanh_deriv_from_output};
use crate::nn::dense::DenseParams;
use crate::nn::dropout::{sample_dropout, DropoutMask};
use crate::nn::linalg::Matrix;
use crate::windows::SeqWindow;

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub input_dim: usize,
    pub hidden: usize,
    pub dropout: f64,
    pub w_update: Matrix,
    pub u_update: Matrix,
    pub b_update: Vec<f64>,
    pub w_reset: Matrix,
    pub u_reset: Matrix,
    pub b_reset: Vec<f64>,
    pub w_cand: Matrix,
    pub u_cand: Matrix,
    pub b_cand: Vec<f64>,
    pub head: DenseParams,
}

pub(crate) fn init_gru(
    features: usize,
    hidden: usize,
    dropout: f64,
    rng: &mut dyn RngCore,
) -> GruParams {
    let gate = |rng: &mut dyn RngCore| {
        (
            xavier_matrix(hidden, features, rng),
            xavier_matrix(hidden, hidden, rng),
            vec![0.0; hidden],
        )
    };
    let (w_update, u_update, b_update) = gate(rng);
    let (w_reset, u_reset, b_reset) = gate(rng);
    let (w_cand, u_cand, b_cand) = gate(rng);
    let head = xavier_dense(1, hidden, rng);
    GruParams {
        input_dim: features,
        hidden,
        dropout,
        w_update,
        u_update,
        b_update,
        w_reset,
        u_reset,
        b_reset,
        w_cand,
        u_cand,
        b_cand,
        head,
    }
}

impl GruParams {
    pub fn zeros_like(&self) -> Self {
        let z = |m: &Matrix| Matrix::zeros(m.rows(), m.cols());
        GruParams {
            input_dim: self.input_dim,
            hidden: self.hidden,
            dropout: self.dropout,
            w_update: z(&self.w_update),
            u_update: z(&self.u_update),
            b_update: vec![0.0; self.b_update.len()],
            w_reset: z(&self.w_reset),
            u_reset: z(&self.u_reset),
            b_reset: vec![0.0; self.b_reset.len()],
            w_cand: z(&self.w_cand),
            u_cand: z(&self.u_cand),
            b_cand: vec![0.0; self.b_cand.len()],
            head: DenseParams {
                weights: z(&self.head.weights),
                bias: vec![0.0; self.head.bias.len()],
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let h = self.hidden;
        let f = self.input_dim;
        let gate_ok = |w: &Matrix, u: &Matrix, b: &[f64]| {
            w.rows() == h && w.cols() == f && u.rows() == h && u.cols() == h && b.len() == h
        };
        if !(gate_ok(&self.w_update, &self.u_update, &self.b_update)
            && gate_ok(&self.w_reset, &self.u_reset, &self.b_reset)
            && gate_ok(&self.w_cand, &self.u_cand, &self.b_cand))
        {
            return Err(Error::Shape("gru gate blocks are inconsistent".into()));
        }
        if self.head.out_dim() != 1 || self.head.in_dim() != h || self.head.bias.len() != 1 {
            return Err(Error::Shape(format!("gru head must be 1x{h} with one bias")));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Domain(format!(
                "dropout rate must be in [0, 1), got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

/// One GRU step:
/// z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
/// n = tanh(Wn x + Un (r.h) + bn), h' = (1-z).h + z.n.
pub fn gru_cell_forward(x: &[f64], h_prev: &[f64], p: &GruParams) -> Result<Vec<f64>> {
    p.validate()?;
    if x.len() != p.input_dim {
        return Err(Error::Shape(format!(
            "gru cell expects {} features, got {}",
            p.input_dim,
            x.len()
        )));
    }
    if h_prev.len() != p.hidden {
        return Err(Error::Shape(format!("gru state must have {} units", p.hidden)));
    }
    let mut s = GruScratch::new(p.hidden);
    step_forward(p, x, h_prev, &mut s);
    Ok(s.h)
}

struct GruScratch {
    z: Vec<f64>,
    r: Vec<f64>,
    rh: Vec<f64>,
    n: Vec<f64>,
    h: Vec<f64>,
}

impl GruScratch {
    fn new(hidden: usize) -> Self {
        GruScratch {
            z: vec![0.0; hidden],
            r: vec![0.0; hidden],
            rh: vec![0.0; hidden],
            n: vec![0.0; hidden],
            h: vec![0.0; hidden],
        }
    }
}

fn step_forward(p: &GruParams, x: &[f64], h_prev: &[f64], s: &mut GruScratch) {
    s.z.copy_from_slice(&p.b_update);
    p.w_update.matvec_acc(x, &mut s.z);
    p.u_update.matvec_acc(h_prev, &mut s.z);
    s.r.copy_from_slice(&p.b_reset);
    p.w_reset.matvec_acc(x, &mut s.r);
    p.u_reset.matvec_acc(h_prev, &mut s.r);
    for k in 0..p.hidden {
        s.z[k] = sigmoid(s.z[k]);
        s.r[k] = sigmoid(s.r[k]);
        s.rh[k] = s.r[k] * h_prev[k];
    }
    s.n.copy_from_slice(&p.b_cand);
    p.w_cand.matvec_acc(x, &mut s.n);
    p.u_cand.matvec_acc(&s.rh, &mut s.n);
    for k in 0..p.hidden {
        s.n[k] = tanh(s.n[k]);
        s.h[k] = (1.0 - s.z[k]) * h_prev[k] + s.z[k] * s.n[k];
    }
}

/// Per-step values for the backward pass (flat `steps x hidden` arrays).
#[derive(Debug, Clone)]
pub struct GruCache {
    steps: usize,
    hidden: usize,
    update_gate: Vec<f64>,
    reset_gate: Vec<f64>,
    reset_hidden: Vec<f64>,
    cand: Vec<f64>,
    hidden_state: Vec<f64>,
    mask: DropoutMask,
    head_input: Vec<f64>,
    yhat: f64,
}

impl GruCache {
    pub fn prediction(&self) -> f64 {
        self.yhat
    }

    fn at<'a>(&self, field: &'a [f64], t: usize) -> &'a [f64] {
        &field[t * self.hidden..(t + 1) * self.hidden]
    }
}

/// Run the full window with zero-initialized state; dropout on the final
/// hidden state in train mode; linear head.
pub fn gru_sequence_forward(
    window: SeqWindow,
    p: &GruParams,
    mode: Mode,
    rng: &mut dyn RngCore,
) -> Result<(f64, GruCache)> {
    p.validate()?;
    if window.features != p.input_dim {
        return Err(Error::Shape(format!(
            "window has {} features, gru expects {}",
            window.features, p.input_dim
        )));
    }
    if window.steps == 0 {
        return Err(Error::Shape("window must have at least one step".into()));
    }
    let steps = window.steps;
    let hidden = p.hidden;
    let size = steps * hidden;
    let mut cache = GruCache {
        steps,
        hidden,
        update_gate: vec![0.0; size],
        reset_gate: vec![0.0; size],
        reset_hidden: vec![0.0; size],
        cand: vec![0.0; size],
        hidden_state: vec![0.0; size],
        mask: DropoutMask::identity(hidden),
        head_input: Vec::new(),
        yhat: 0.0,
    };
    let zero = vec![0.0; hidden];
    let mut s = GruScratch::new(hidden);
    for t in 0..steps {
        let h_prev = if t == 0 {
            zero.as_slice()
        } else {
            cache.at(&cache.hidden_state, t - 1)
        };
        step_forward(p, window.step(t), h_prev, &mut s);
        let range = t * hidden..(t + 1) * hidden;
        cache.update_gate[range.clone()].copy_from_slice(&s.z);
        cache.reset_gate[range.clone()].copy_from_slice(&s.r);
        cache.reset_hidden[range.clone()].copy_from_slice(&s.rh);
        cache.cand[range.clone()].copy_from_slice(&s.n);
        cache.hidden_state[range].copy_from_slice(&s.h);
    }

    cache.mask = if mode == Mode::Train && p.dropout > 0.0 {
        sample_dropout(hidden, p.dropout, rng)?
    } else {
        DropoutMask::identity(hidden)
    };
    let mut head_in = cache.at(&cache.hidden_state, steps - 1).to_vec();
    cache.mask.apply(&mut head_in);
    cache.head_input = head_in;

    let mut y = p.head.bias[0];
    y += crate::nn::linalg::dot(p.head.weights.row(0), &cache.head_input);
    cache.yhat = y;
    if !y.is_finite() {
        for t in 0..steps {
            if cache
                .at(&cache.hidden_state, t)
                .iter()
                .any(|v| !v.is_finite())
            {
                return Err(Error::Numeric(format!(
                    "non-finite hidden state at step {t}"
                )));
            }
        }
        return Err(Error::Numeric("non-finite prediction at head".into()));
    }
    Ok((y, cache))
}

/// Squared-error loss and exact gradients for every block.
pub fn gru_bptt(
    window: SeqWindow,
    target: f64,
    p: &GruParams,
    mode: Mode,
    rng: &mut dyn RngCore,
) -> Result<(f64, GruParams)> {
    let mut grads = p.zeros_like();
    let loss = gru_accumulate(p, window, target, mode, rng, &mut grads)?;
    Ok((loss, grads))
}

fn gru_accumulate(
    p: &GruParams,
    window: SeqWindow,
    target: f64,
    mode: Mode,
    rng: &mut dyn RngCore,
    grads: &mut GruParams,
) -> Result<f64> {
    let (yhat, cache) = gru_sequence_forward(window, p, mode, rng)?;
    let loss = (yhat - target) * (yhat - target);
    let dy = 2.0 * (yhat - target);
    let hidden = p.hidden;

    grads.head.bias[0] += dy;
    grads.head.weights.add_outer(&[dy], &cache.head_input);
    let mut dh = vec![0.0; hidden];
    p.head.weights.tmatvec_acc(&[dy], &mut dh);
    cache.mask.apply(&mut dh);

    let mut da_z = vec![0.0; hidden];
    let mut da_r = vec![0.0; hidden];
    let mut da_n = vec![0.0; hidden];
    let mut d_rh = vec![0.0; hidden];
    let mut dh_prev = vec![0.0; hidden];
    let zero = vec![0.0; hidden];
    for t in (0..cache.steps).rev() {
        let z = cache.at(&cache.update_gate, t);
        let r = cache.at(&cache.reset_gate, t);
        let rh = cache.at(&cache.reset_hidden, t);
        let n = cache.at(&cache.cand, t);
        let h_prev = if t == 0 {
            zero.as_slice()
        } else {
            cache.at(&cache.hidden_state, t - 1)
        };

        // h = (1-z) h_prev + z n
        for k in 0..hidden {
            let d_z = dh[k] * (n[k] - h_prev[k]);
            let d_n = dh[k] * z[k];
            dh_prev[k] = dh[k] * (1.0 - z[k]);
            da_z[k] = d_z * sigmoid_deriv_from_output(z[k]);
            da_n[k] = d_n * tanh_deriv_from_output(n[k]);
        }
        // Candidate feeds from r.h_prev through u_cand.
        for d in d_rh.iter_mut() {
            *d = 0.0;
        }
        p.u_cand.tmatvec_acc(&da_n, &mut d_rh);
        for k in 0..hidden {
            let d_r = d_rh[k] * h_prev[k];
            dh_prev[k] += d_rh[k] * r[k];
            da_r[k] = d_r * sigmoid_deriv_from_output(r[k]);
        }

        let x = window.step(t);
        grads.w_update.add_outer(&da_z, x);
        grads.w_reset.add_outer(&da_r, x);
        grads.w_cand.add_outer(&da_n, x);
        grads.u_update.add_outer(&da_z, h_prev);
        grads.u_reset.add_outer(&da_r, h_prev);
        grads.u_cand.add_outer(&da_n, rh);
        for k in 0..hidden {
            grads.b_update[k] += da_z[k];
            grads.b_reset[k] += da_r[k];
            grads.b_cand[k] += da_n[k];
        }
        p.u_update.tmatvec_acc(&da_z, &mut dh_prev);
        p.u_reset.tmatvec_acc(&da_r, &mut dh_prev);
        std::mem::swap(&mut dh, &mut dh_prev);
    }
    Ok(loss)
}

impl SequenceModel for GruParams {
    fn kind(&self) -> ModelKind {
        ModelKind::Gru
    }

    fn check_window(&self, window: &SeqWindow) -> Result<()> {
        if window.features != self.input_dim || window.steps == 0 {
            return Err(Error::Shape(format!(
                "gru expects windows of {} features, got {}x{}",
                self.input_dim, window.steps, window.features
            )));
        }
        Ok(())
    }

    fn zeros_like(&self) -> Self {
        GruParams::zeros_like(self)
    }

    fn predict(&self, window: SeqWindow, mode: Mode, rng: &mut dyn RngCore) -> Result<f64> {
        gru_sequence_forward(window, self, mode, rng).map(|(y, _)| y)
    }

    fn accumulate_grads(
        &self,
        window: SeqWindow,
        target: f64,
        mode: Mode,
        rng: &mut dyn RngCore,
        grads: &mut Self,
    ) -> Result<f64> {
        gru_accumulate(self, window, target, mode, rng, grads)
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![
            self.w_update.as_slice(),
            self.u_update.as_slice(),
            self.b_update.as_slice(),
            self.w_reset.as_slice(),
            self.u_reset.as_slice(),
            self.b_reset.as_slice(),
            self.w_cand.as_slice(),
            self.u_cand.as_slice(),
            self.b_cand.as_slice(),
            self.head.weights.as_slice(),
            self.head.bias.as_slice(),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w_update.as_mut_slice(),
            self.u_update.as_mut_slice(),
            self.b_update.as_mut_slice(),
            self.w_reset.as_mut_slice(),
            self.u_reset.as_mut_slice(),
            self.b_reset.as_mut_slice(),
            self.w_cand.as_mut_slice(),
            self.u_cand.as_mut_slice(),
            self.b_cand.as_mut_slice(),
            self.head.weights.as_mut_slice(),
            self.head.bias.as_mut_slice(),
        ]
    }
}
