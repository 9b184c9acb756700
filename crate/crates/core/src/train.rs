//! Mini-batch training with early stopping, plus validation-loss grid search.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{init_params, Mode, ModelKind, NeuralParams, SequenceModel};
use crate::nn::adam::{AdamHyper, AdamState};
use crate::windows::WindowSet;

/// Minimum decrease of the validation loss that counts as an improvement;
/// guards the early-stopping counter against float jitter.
pub const MIN_IMPROVEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub hidden: usize,
    pub dropout: f64,
    /// Optional extra dense ReLU layer between the LSTM state and its head.
    pub extra_dense: Option<usize>,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelKind::Lstm,
            hidden: 50,
            dropout: 0.2,
            extra_dense: None,
            batch_size: 64,
            max_epochs: 100,
            patience: 10,
            learning_rate: 1e-3,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.patience < 1 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if self.max_epochs < 1 {
            return Err(Error::Config("max epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStopping,
    MaxEpochs,
}

/// Per-epoch losses and where training stopped. Epochs are 1-based;
/// `train_loss[e-1]` belongs to epoch `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub best_epoch: usize,
    pub stop_reason: StopReason,
}

impl TrainHistory {
    pub fn best_val_loss(&self) -> f64 {
        self.val_loss[self.best_epoch - 1]
    }

    pub fn epochs_run(&self) -> usize {
        self.val_loss.len()
    }
}

/// Patience-based stopping on the validation loss. Kept separate from the
/// training loop so the stopping rule can be driven by loss fixtures.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_epoch: usize,
    stall: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
            stall: 0,
        }
    }

    /// Record epoch `epoch`'s validation loss; returns true when it improved
    /// the best by more than [`MIN_IMPROVEMENT`].
    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> bool {
        if val_loss < self.best - MIN_IMPROVEMENT {
            self.best = val_loss;
            self.best_epoch = epoch;
            self.stall = 0;
            true
        } else {
            self.stall += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.stall >= self.patience
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }
}

/// Mean squared error over a window set in eval mode.
pub fn validation_mse<M: SequenceModel>(params: &M, set: &WindowSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::InsufficientData("empty validation set".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0); // eval mode never draws
    let mut sum = 0.0;
    for i in 0..set.len() {
        let y = params.predict(set.input(i), Mode::Eval, &mut rng)?;
        let d = y - set.targets[i];
        sum += d * d;
    }
    Ok(sum / set.len() as f64)
}

/// Train with shuffled mini-batches and Adam, evaluating the validation MSE
/// after every epoch; stops when the validation loss has not improved for
/// `patience` consecutive epochs or at `max_epochs`. Returns the parameters
/// from the best validation epoch.
pub fn train<M: SequenceModel>(
    config: &TrainConfig,
    params: M,
    train_set: &WindowSet,
    val_set: &WindowSet,
) -> Result<(M, TrainHistory)> {
    config.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InsufficientData(
            "training and validation sets must be non-empty".into(),
        ));
    }
    let mut params = params;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam = AdamState::new(
        &params.block_lengths(),
        AdamHyper::with_learning_rate(config.learning_rate),
    );
    let mut grads = params.zeros_like();
    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best_params = params.clone();
    let mut history = TrainHistory {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        best_epoch: 0,
        stop_reason: StopReason::MaxEpochs,
    };

    for epoch in 1..=config.max_epochs {
        indices.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in indices.chunks(config.batch_size).enumerate() {
            for b in grads.blocks_mut() {
                b.fill(0.0);
            }
            let mut batch_loss = 0.0;
            for &i in batch {
                batch_loss += params.accumulate_grads(
                    train_set.input(i),
                    train_set.targets[i],
                    Mode::Train,
                    &mut rng,
                    &mut grads,
                )?;
            }
            if !batch_loss.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: batch_idx,
                    message: format!("batch loss {batch_loss}"),
                });
            }
            epoch_loss += batch_loss;
            let scale = 1.0 / batch.len() as f64;
            grads.scale_blocks(scale);
            let grad_blocks = grads.blocks();
            // Split borrow: collect grads first, then mutate params.
            let grad_refs: Vec<&[f64]> = grad_blocks;
            adam_step_into(&mut adam, &mut params, &grad_refs, epoch, batch_idx)?;
        }
        let train_loss = epoch_loss / train_set.len() as f64;
        let val_loss = validation_mse(&params, val_set)?;
        if !val_loss.is_finite() {
            return Err(Error::Divergence {
                epoch,
                batch: 0,
                message: format!("validation loss {val_loss}"),
            });
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(val_loss);
        if stopper.observe(epoch, val_loss) {
            best_params = params.clone();
        }
        if stopper.should_stop() {
            history.stop_reason = StopReason::EarlyStopping;
            break;
        }
    }
    history.best_epoch = stopper.best_epoch();
    Ok((best_params, history))
}

fn adam_step_into<M: SequenceModel>(
    adam: &mut AdamState,
    params: &mut M,
    grads: &[&[f64]],
    epoch: usize,
    batch: usize,
) -> Result<()> {
    let mut blocks = params.blocks_mut();
    adam.step(&mut blocks, grads)?;
    // Cheap divergence guard: the head bias is touched by every update.
    if let Some(last) = blocks.last() {
        if last.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                epoch,
                batch,
                message: "non-finite parameter after update".into(),
            });
        }
    }
    Ok(())
}

/// Hyperparameter grid; every combination is trained with the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    pub hidden: Vec<usize>,
    pub dropout: Vec<f64>,
    pub batch_size: Vec<usize>,
    pub learning_rate: Vec<f64>,
}

impl Default for GridSpace {
    fn default() -> Self {
        GridSpace {
            hidden: vec![32, 50, 64],
            dropout: vec![0.0, 0.2],
            batch_size: vec![32, 64],
            learning_rate: vec![1e-3, 3e-4],
        }
    }
}

impl GridSpace {
    pub fn len(&self) -> usize {
        self.hidden.len() * self.dropout.len() * self.batch_size.len() * self.learning_rate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One grid-search run's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub hidden: usize,
    pub dropout: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Best validation MSE of the run; None when the run diverged.
    pub val_loss: Option<f64>,
    pub error: Option<String>,
}

/// Result of a grid search: the winning configuration, its trained
/// parameters and history, and the full table in iteration order.
pub struct GridOutcome {
    pub best_config: TrainConfig,
    pub best_params: NeuralParams,
    pub best_history: TrainHistory,
    pub table: Vec<GridRow>,
}

/// Train every combination and keep the one with the lowest validation loss.
///
/// Iteration order is nested loops over the fields in alphabetical order
/// (batch_size, dropout, hidden, learning_rate), each list in its declared
/// order; ties keep the earlier combination. Diverging runs are recorded in
/// the table and excluded from selection.
pub fn grid_search(
    base: &TrainConfig,
    space: &GridSpace,
    train_set: &WindowSet,
    val_set: &WindowSet,
) -> Result<GridOutcome> {
    if space.is_empty() {
        return Err(Error::Config("grid space is empty".into()));
    }
    let mut table = Vec::with_capacity(space.len());
    let mut best: Option<(f64, TrainConfig, NeuralParams, TrainHistory)> = None;
    for &batch_size in &space.batch_size {
        for &dropout in &space.dropout {
            for &hidden in &space.hidden {
                for &learning_rate in &space.learning_rate {
                    let config = TrainConfig {
                        hidden,
                        dropout,
                        batch_size,
                        learning_rate,
                        ..*base
                    };
                    let params = init_params(
                        config.model,
                        train_set.features(),
                        train_set.window(),
                        hidden,
                        dropout,
                        config.extra_dense,
                        config.seed,
                    )?;
                    match train(&config, params, train_set, val_set) {
                        Ok((trained, history)) => {
                            let loss = history.best_val_loss();
                            table.push(GridRow {
                                hidden,
                                dropout,
                                batch_size,
                                learning_rate,
                                val_loss: Some(loss),
                                error: None,
                            });
                            let better = best.as_ref().is_none_or(|(b, ..)| loss < *b);
                            if better {
                                best = Some((loss, config, trained, history));
                            }
                        }
                        Err(e @ (Error::Divergence { .. } | Error::Numeric(_))) => {
                            table.push(GridRow {
                                hidden,
                                dropout,
                                batch_size,
                                learning_rate,
                                val_loss: None,
                                error: Some(e.to_string()),
                            });
                        }
                        Err(other) => return Err(other),
                    }
                }
            }
        }
    }
    let (_, best_config, best_params, best_history) = best.ok_or_else(|| {
        Error::Search("every grid combination diverged or failed".into())
    })?;
    Ok(GridOutcome {
        best_config,
        best_params,
        best_history,
        table,
    })
}
