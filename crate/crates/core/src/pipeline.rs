//! End-to-end data preparation: imputation, feature engineering, temporal
//! split, train-only scaler fit, scaling, and windowing.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::features::{
    apply_scale, engineer_features, fit_minmax, temporal_split, FeatureMatrix, ScalerParams,
    SplitIndices,
};
use crate::frame::{impute_linear, TimeSeriesFrame};
use crate::residual::quantile_linear;
use crate::windows::{make_windows, WindowSet, HORIZON, WINDOW};

/// The split fractions used throughout.
pub const SPLIT_FRACTIONS: (f64, f64, f64) = (0.70, 0.15, 0.15);

/// Everything downstream stages need: the scaled matrix, the scaler, the
/// split, consumption bin edges (kWh tertiles of the training split), and
/// the three window sets.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub matrix: FeatureMatrix,
    pub scaler: ScalerParams,
    pub splits: SplitIndices,
    pub bin_edges: (f64, f64),
    pub train: WindowSet,
    pub validation: WindowSet,
    pub test: WindowSet,
}

/// Manifest persisted alongside the prepared CSV; enough to rebuild
/// [`PreparedData`] without the raw file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    /// Timestamp of feature-matrix row 0 (raw row 168), ISO-8601 Z.
    pub origin_timestamp: String,
    pub n_rows: usize,
    pub feature_registry: Vec<String>,
    pub splits: SplitIndices,
    pub window: usize,
    pub horizon: usize,
    pub bin_edges: (f64, f64),
    pub scaler_digest: String,
}

/// Run the full preparation pipeline on a raw frame.
pub fn prepare(frame: &TimeSeriesFrame) -> Result<PreparedData> {
    let imputed = impute_linear(frame)?;
    let matrix = engineer_features(&imputed)?;
    let splits = temporal_split(matrix.n_rows(), SPLIT_FRACTIONS)?;
    let scaler = fit_minmax(&matrix, splits.train)?;

    // Bin edges: tertiles of the unscaled training consumption.
    let consumption = matrix.column("consumption")?;
    let mut train_consumption = consumption[splits.train.as_range()].to_vec();
    train_consumption.sort_by(f64::total_cmp);
    let bin_edges = (
        quantile_linear(&train_consumption, 1.0 / 3.0),
        quantile_linear(&train_consumption, 2.0 / 3.0),
    );

    let scaled = apply_scale(&matrix, &scaler)?;
    let train = make_windows(&scaled, splits.train, WINDOW, HORIZON)?;
    let validation = make_windows(&scaled, splits.validation, WINDOW, HORIZON)?;
    let test = make_windows(&scaled, splits.test, WINDOW, HORIZON)?;
    Ok(PreparedData {
        matrix: scaled,
        scaler,
        splits,
        bin_edges,
        train,
        validation,
        test,
    })
}

impl PreparedData {
    pub fn manifest(&self) -> SplitManifest {
        SplitManifest {
            origin_timestamp: self.matrix.timestamps[0]
                .format(crate::frame::TIMESTAMP_FORMAT)
                .to_string(),
            n_rows: self.matrix.n_rows(),
            feature_registry: self.matrix.columns().to_vec(),
            splits: self.splits,
            window: WINDOW,
            horizon: HORIZON,
            bin_edges: self.bin_edges,
            scaler_digest: self.scaler.digest(),
        }
    }
}
