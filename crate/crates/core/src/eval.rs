//! Test-split evaluation: prediction series on both scales, metric suite,
//! confusion matrix over consumption bins, and residual analyses.

use chrono::{DateTime, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arima::{forecast_one_step, ArimaModel};
use crate::error::{Error, Result};
use crate::features::invert_scale;
use crate::metrics::{discretize_and_confuse, ConfusionMatrix, MetricSet, MetricsReport};
use crate::models::{Mode, NeuralParams, SequenceModel};
use crate::pipeline::PreparedData;
use crate::residual::{residual_analysis, ResidualStats};
use crate::windows::WINDOW;

/// Aligned actual/predicted series for the evaluated split.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PredictionSeries {
    pub timestamps: Vec<DateTime<Utc>>,
    pub actual_scaled: Vec<f64>,
    pub predicted_scaled: Vec<f64>,
    pub actual_kwh: Vec<f64>,
    pub predicted_kwh: Vec<f64>,
}

impl PredictionSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }
}

/// Everything the evaluation stage produces for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
    /// Residual analysis on the original kWh scale.
    pub residuals: ResidualStats,
    #[serde(skip)]
    pub predictions: PredictionSeries,
}

/// Eval-mode predictions of a neural model over the test windows.
pub fn neural_test_predictions(
    params: &NeuralParams,
    prepared: &PreparedData,
) -> Result<Vec<f64>> {
    let set = &prepared.test;
    let mut rng = ChaCha8Rng::seed_from_u64(0); // eval mode draws nothing
    let mut out = Vec::with_capacity(set.len());
    for i in 0..set.len() {
        out.push(params.predict(set.input(i), Mode::Eval, &mut rng)?);
    }
    Ok(out)
}

/// One-step-ahead ARIMA predictions aligned to the same test targets the
/// neural models see. Each forecast conditions on every actual observation
/// (scaled consumption) before its target row.
pub fn arima_test_predictions(model: &ArimaModel, prepared: &PreparedData) -> Result<Vec<f64>> {
    let series = prepared.matrix.column("consumption")?;
    let start = prepared.splits.test.start + WINDOW;
    let end = prepared.splits.test.end;
    let mut out = Vec::with_capacity(end - start);
    for t in start..end {
        out.push(forecast_one_step(model, &series[..t])?);
    }
    Ok(out)
}

/// Assemble the full evaluation from scaled predictions.
pub fn evaluate_predictions(
    predicted_scaled: Vec<f64>,
    prepared: &PreparedData,
) -> Result<Evaluation> {
    let set = &prepared.test;
    if predicted_scaled.len() != set.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} test windows",
            predicted_scaled.len(),
            set.len()
        )));
    }
    let actual_scaled = set.targets.clone();
    let actual_kwh = invert_scale(&actual_scaled, &prepared.scaler, "consumption")?;
    let predicted_kwh = invert_scale(&predicted_scaled, &prepared.scaler, "consumption")?;
    let timestamps = set.target_timestamps.clone();

    let metrics = MetricsReport {
        n: set.len(),
        normalized: MetricSet::compute(&actual_scaled, &predicted_scaled)?,
        original_kwh: MetricSet::compute(&actual_kwh, &predicted_kwh)?,
    };
    let confusion = discretize_and_confuse(&actual_kwh, &predicted_kwh, prepared.bin_edges)?;
    let residuals = residual_analysis(&actual_kwh, &predicted_kwh, &timestamps)?;
    Ok(Evaluation {
        metrics,
        confusion,
        residuals,
        predictions: PredictionSeries {
            timestamps,
            actual_scaled,
            predicted_scaled,
            actual_kwh,
            predicted_kwh,
        },
    })
}
