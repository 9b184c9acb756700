//! The neural forecasters: LSTM, GRU, and FNN, each with a sequence forward
//! pass and hand-written backpropagation.
//!
//! All three share the same contract: a window of `steps x features` values
//! in, one scalar out, exact analytic gradients for every parameter block.

pub mod fnn;
pub mod gru;
pub mod lstm;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::dense::DenseParams;
use crate::nn::linalg::Matrix;
use crate::windows::SeqWindow;

pub use fnn::{fnn_backward, fnn_forward, FnnParams};
pub use gru::{gru_bptt, gru_cell_forward, gru_sequence_forward, GruParams};
pub use lstm::{lstm_bptt, lstm_cell_forward, lstm_sequence_forward, HiddenState, LstmParams};

/// Forward-pass mode: training applies dropout, evaluation never does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Which forecaster a checkpoint or run refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lstm,
    Gru,
    Fnn,
    Arima,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Lstm => "lstm",
            ModelKind::Gru => "gru",
            ModelKind::Fnn => "fnn",
            ModelKind::Arima => "arima",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lstm" => Ok(ModelKind::Lstm),
            "gru" => Ok(ModelKind::Gru),
            "fnn" => Ok(ModelKind::Fnn),
            "arima" => Ok(ModelKind::Arima),
            other => Err(Error::Config(format!(
                "unknown model kind '{other}' (expected lstm, gru, fnn, or arima)"
            ))),
        }
    }
}

/// Common surface of the three neural forecasters.
///
/// Gradients are represented by a second value of the same type (identical
/// shapes, zero hyperparameters), which keeps the optimizer generic.
pub trait SequenceModel: Clone {
    fn kind(&self) -> ModelKind;

    /// Error unless `window` matches the model's expected shape.
    fn check_window(&self, window: &SeqWindow) -> Result<()>;

    /// A same-shaped, zero-valued gradient holder.
    fn zeros_like(&self) -> Self;

    /// Scalar prediction for one window.
    fn predict(&self, window: SeqWindow, mode: Mode, rng: &mut dyn RngCore) -> Result<f64>;

    /// Add this sample's gradients into `grads` and return its squared-error
    /// loss `(prediction - target)^2`.
    fn accumulate_grads(
        &self,
        window: SeqWindow,
        target: f64,
        mode: Mode,
        rng: &mut dyn RngCore,
        grads: &mut Self,
    ) -> Result<f64>;

    /// Parameter blocks in a fixed, documented order.
    fn blocks(&self) -> Vec<&[f64]>;
    fn blocks_mut(&mut self) -> Vec<&mut [f64]>;

    fn block_lengths(&self) -> Vec<usize> {
        self.blocks().iter().map(|b| b.len()).collect()
    }

    /// All parameters concatenated in block order.
    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in self.blocks() {
            out.extend_from_slice(b);
        }
        out
    }

    /// Overwrite all parameters from a flat vector (block order).
    fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        let total: usize = self.block_lengths().iter().sum();
        if flat.len() != total {
            return Err(Error::Shape(format!(
                "flat parameter vector has {} entries, model has {total}",
                flat.len()
            )));
        }
        let mut offset = 0;
        for b in self.blocks_mut() {
            b.copy_from_slice(&flat[offset..offset + b.len()]);
            offset += b.len();
        }
        Ok(())
    }

    /// Multiply every block by `alpha` (used to average batch gradients).
    fn scale_blocks(&mut self, alpha: f64) {
        for b in self.blocks_mut() {
            for v in b.iter_mut() {
                *v *= alpha;
            }
        }
    }
}

/// Parameters of any of the three neural model kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum NeuralParams {
    Lstm(LstmParams),
    Gru(GruParams),
    Fnn(FnnParams),
}

impl NeuralParams {
    pub fn hidden(&self) -> usize {
        match self {
            NeuralParams::Lstm(p) => p.hidden,
            NeuralParams::Gru(p) => p.hidden,
            NeuralParams::Fnn(p) => p.hidden1.out_dim(),
        }
    }

    pub fn dropout(&self) -> f64 {
        match self {
            NeuralParams::Lstm(p) => p.dropout,
            NeuralParams::Gru(p) => p.dropout,
            NeuralParams::Fnn(_) => 0.0,
        }
    }
}

macro_rules! delegate {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            NeuralParams::Lstm($p) => $e,
            NeuralParams::Gru($p) => $e,
            NeuralParams::Fnn($p) => $e,
        }
    };
}

impl SequenceModel for NeuralParams {
    fn kind(&self) -> ModelKind {
        delegate!(self, p => p.kind())
    }

    fn check_window(&self, window: &SeqWindow) -> Result<()> {
        delegate!(self, p => p.check_window(window))
    }

    fn zeros_like(&self) -> Self {
        match self {
            NeuralParams::Lstm(p) => NeuralParams::Lstm(p.zeros_like()),
            NeuralParams::Gru(p) => NeuralParams::Gru(p.zeros_like()),
            NeuralParams::Fnn(p) => NeuralParams::Fnn(p.zeros_like()),
        }
    }

    fn predict(&self, window: SeqWindow, mode: Mode, rng: &mut dyn RngCore) -> Result<f64> {
        delegate!(self, p => p.predict(window, mode, rng))
    }

    fn accumulate_grads(
        &self,
        window: SeqWindow,
        target: f64,
        mode: Mode,
        rng: &mut dyn RngCore,
        grads: &mut Self,
    ) -> Result<f64> {
        match (self, grads) {
            (NeuralParams::Lstm(p), NeuralParams::Lstm(g)) => {
                p.accumulate_grads(window, target, mode, rng, g)
            }
            (NeuralParams::Gru(p), NeuralParams::Gru(g)) => {
                p.accumulate_grads(window, target, mode, rng, g)
            }
            (NeuralParams::Fnn(p), NeuralParams::Fnn(g)) => {
                p.accumulate_grads(window, target, mode, rng, g)
            }
            _ => Err(Error::Shape(
                "gradient holder does not match model kind".into(),
            )),
        }
    }

    fn blocks(&self) -> Vec<&[f64]> {
        delegate!(self, p => p.blocks())
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        delegate!(self, p => p.blocks_mut())
    }
}

/// Xavier-uniform matrix: entries from U(-s, s) with s = sqrt(6/(fan_in+fan_out)).
pub(crate) fn xavier_matrix(rows: usize, cols: usize, rng: &mut dyn RngCore) -> Matrix {
    let s = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-s..s))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("xavier dims agree by construction")
}

pub(crate) fn xavier_dense(out_dim: usize, in_dim: usize, rng: &mut dyn RngCore) -> DenseParams {
    DenseParams {
        weights: xavier_matrix(out_dim, in_dim, rng),
        bias: vec![0.0; out_dim],
    }
}

/// Initialize parameters for `kind` deterministically from `seed`.
///
/// Weights are Xavier-uniform per block; the LSTM forget-gate bias starts at
/// 1.0 and every other bias at 0. `extra_dense` enables the optional ReLU
/// layer between the LSTM state and its head.
pub fn init_params(
    kind: ModelKind,
    features: usize,
    window: usize,
    hidden: usize,
    dropout: f64,
    extra_dense: Option<usize>,
    seed: u64,
) -> Result<NeuralParams> {
    if features == 0 || window == 0 || hidden == 0 {
        return Err(Error::Config(
            "features, window, and hidden size must all be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        ModelKind::Lstm => Ok(NeuralParams::Lstm(lstm::init_lstm(
            features,
            hidden,
            dropout,
            extra_dense,
            &mut rng,
        ))),
        ModelKind::Gru => Ok(NeuralParams::Gru(gru::init_gru(
            features,
            hidden,
            dropout,
            &mut rng,
        ))),
        ModelKind::Fnn => Ok(NeuralParams::Fnn(fnn::init_fnn(
            window * features,
            &mut rng,
        ))),
        ModelKind::Arima => Err(Error::Config(
            "arima parameters come from fitting, not random init".into(),
        )),
    }
}
