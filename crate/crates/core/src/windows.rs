//! Sliding-window supervised samples: 24-step input sequences paired with
//! next-hour targets.

use chrono::{DateTime, Utc};

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, RowRange};

/// Default input window length (hours).
pub const WINDOW: usize = 24;
/// Default forecast horizon (hours ahead of the window end).
pub const HORIZON: usize = 1;

/// Borrowed view of one input sequence: `steps` rows of `features` values.
#[derive(Debug, Clone, Copy)]
pub struct SeqWindow<'a> {
    pub data: &'a [f64],
    pub steps: usize,
    pub features: usize,
}

impl<'a> SeqWindow<'a> {
    pub fn new(data: &'a [f64], steps: usize, features: usize) -> Result<Self> {
        if data.len() != steps * features {
            return Err(Error::Shape(format!(
                "window of {steps} steps x {features} features needs {} values, got {}",
                steps * features,
                data.len()
            )));
        }
        Ok(SeqWindow {
            data,
            steps,
            features,
        })
    }

    /// Feature vector at timestep `t`.
    pub fn step(&self, t: usize) -> &'a [f64] {
        &self.data[t * self.features..(t + 1) * self.features]
    }
}

/// Supervised samples for one split: flattened inputs of shape
/// n x window x features, scalar targets, and the target timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub target_timestamps: Vec<DateTime<Utc>>,
    window: usize,
    features: usize,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn input(&self, i: usize) -> SeqWindow<'_> {
        let span = self.window * self.features;
        SeqWindow {
            data: &self.inputs[i * span..(i + 1) * span],
            steps: self.window,
            features: self.features,
        }
    }

    /// Build a window set directly from raw samples (used by fixtures).
    pub fn from_parts(
        inputs: Vec<f64>,
        targets: Vec<f64>,
        target_timestamps: Vec<DateTime<Utc>>,
        window: usize,
        features: usize,
    ) -> Result<Self> {
        if inputs.len() != targets.len() * window * features
            || targets.len() != target_timestamps.len()
        {
            return Err(Error::Shape("window set parts disagree on length".into()));
        }
        Ok(WindowSet {
            inputs,
            targets,
            target_timestamps,
            window,
            features,
        })
    }
}

/// Cut sliding windows out of one split of a scaled feature matrix.
///
/// Sample `i` stacks rows `split.start + i .. split.start + i + window` as
/// input; its target is the scaled consumption at the row `horizon` steps
/// past the window end. Windows never straddle split boundaries, so a split
/// of `L` rows yields `L - window - horizon + 1` samples.
pub fn make_windows(
    matrix: &FeatureMatrix,
    split: RowRange,
    window: usize,
    horizon: usize,
) -> Result<WindowSet> {
    if window == 0 || horizon == 0 {
        return Err(Error::Config(
            "window and horizon must both be at least 1".into(),
        ));
    }
    if split.end > matrix.n_rows() {
        return Err(Error::Shape(format!(
            "split {split:?} exceeds matrix rows {}",
            matrix.n_rows()
        )));
    }
    let needed = window + horizon;
    if split.len() < needed {
        return Err(Error::InsufficientData(format!(
            "split of {} rows cannot produce a window of {window} plus horizon {horizon}",
            split.len()
        )));
    }
    let target_col = matrix.column_index("consumption")?;
    let features = matrix.n_cols();
    let n = split.len() - window - horizon + 1;
    let mut inputs = Vec::with_capacity(n * window * features);
    let mut targets = Vec::with_capacity(n);
    let mut target_timestamps = Vec::with_capacity(n);
    for i in 0..n {
        let base = split.start + i;
        for r in base..base + window {
            inputs.extend_from_slice(matrix.row(r));
        }
        let target_row = base + window + horizon - 1;
        targets.push(matrix.row(target_row)[target_col]);
        target_timestamps.push(matrix.timestamps[target_row]);
    }
    WindowSet::from_parts(inputs, targets, target_timestamps, window, features)
}
