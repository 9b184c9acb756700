//! Error metrics, correlation statistics, and the binned confusion matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(y: &[f64], yhat: &[f64]) -> Result<usize> {
    if y.len() != yhat.len() {
        return Err(Error::Shape(format!(
            "metric inputs have lengths {} and {}",
            y.len(),
            yhat.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Domain("metric over empty vectors".into()));
    }
    Ok(y.len())
}

/// Mean absolute error.
pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let n = check_pair(y, yhat)?;
    Ok(y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n as f64)
}

/// Root mean squared error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let n = check_pair(y, yhat)?;
    Ok((y.iter()
        .zip(yhat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n as f64)
        .sqrt())
}

/// Mean absolute percentage error, in percent. Targets at or near zero
/// (|y| <= 1e-9) make the ratio meaningless and are an error.
pub fn mape(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let n = check_pair(y, yhat)?;
    if let Some(bad) = y.iter().position(|v| v.abs() <= 1e-9) {
        return Err(Error::Domain(format!(
            "mape undefined: target at index {bad} is {} (|y| <= 1e-9)",
            y[bad]
        )));
    }
    Ok(100.0 / n as f64
        * y.iter()
            .zip(yhat)
            .map(|(a, b)| ((a - b) / a).abs())
            .sum::<f64>())
}

/// Pearson correlation coefficient between actual and predicted values.
pub fn pearson_r(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let n = check_pair(y, yhat)?;
    if n < 2 {
        return Err(Error::Domain("pearson r needs at least two points".into()));
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mean_p = yhat.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_y = 0.0;
    let mut var_p = 0.0;
    for (a, b) in y.iter().zip(yhat) {
        cov += (a - mean_y) * (b - mean_p);
        var_y += (a - mean_y) * (a - mean_y);
        var_p += (b - mean_p) * (b - mean_p);
    }
    if var_y == 0.0 || var_p == 0.0 {
        return Err(Error::Domain(
            "pearson r undefined for a constant series".into(),
        ));
    }
    Ok(cov / (var_y * var_p).sqrt())
}

/// Coefficient of determination: 1 - SSR/SST. Negative for predictors worse
/// than the mean.
pub fn r_squared(y: &[f64], yhat: &[f64]) -> Result<f64> {
    let n = check_pair(y, yhat)?;
    if n < 2 {
        return Err(Error::Domain("r-squared needs at least two points".into()));
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|a| (a - mean_y) * (a - mean_y)).sum();
    if sst == 0.0 {
        return Err(Error::Domain(
            "r-squared undefined for a constant target series".into(),
        ));
    }
    let ssr: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - ssr / sst)
}

/// The five metrics over one prediction series on one scale. `mape_percent`
/// is None when a target sits at zero on that scale (possible for scaled
/// data; never for the kWh data this pipeline targets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub mae: f64,
    pub rmse: f64,
    pub mape_percent: Option<f64>,
    pub pearson_r: f64,
    pub r_squared: f64,
}

impl MetricSet {
    pub fn compute(y: &[f64], yhat: &[f64]) -> Result<Self> {
        Ok(MetricSet {
            mae: mae(y, yhat)?,
            rmse: rmse(y, yhat)?,
            mape_percent: mape(y, yhat).ok(),
            pearson_r: pearson_r(y, yhat)?,
            r_squared: r_squared(y, yhat)?,
        })
    }
}

/// Metrics for one model on one split, on both scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub normalized: MetricSet,
    pub original_kwh: MetricSet,
}

/// Consumption bins used by the confusion matrix.
pub const BIN_LABELS: [&str; 3] = ["Low", "Medium", "High"];

/// 3x3 confusion counts over Low/Medium/High bins, rows = actual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
    pub edges: (f64, f64),
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> [u64; 3] {
        [0, 1, 2].map(|r| self.counts[r].iter().sum())
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }
}

fn bin_of(v: f64, edges: (f64, f64)) -> usize {
    if v < edges.0 {
        0
    } else if v < edges.1 {
        1
    } else {
        2
    }
}

/// Bin actual and predicted values into Low = (-inf, e1), Medium = [e1, e2),
/// High = [e2, inf) and tabulate the counts.
pub fn discretize_and_confuse(
    y: &[f64],
    yhat: &[f64],
    edges: (f64, f64),
) -> Result<ConfusionMatrix> {
    check_pair(y, yhat)?;
    if edges.0 >= edges.1 || edges.0.is_nan() || edges.1.is_nan() {
        return Err(Error::Domain(format!(
            "bin edges must be strictly increasing, got {edges:?}"
        )));
    }
    let mut counts = [[0u64; 3]; 3];
    for (a, p) in y.iter().zip(yhat) {
        counts[bin_of(*a, edges)][bin_of(*p, edges)] += 1;
    }
    Ok(ConfusionMatrix { counts, edges })
}
