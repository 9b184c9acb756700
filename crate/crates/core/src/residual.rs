//! Residual-distribution and hourly-error analyses: histogram, Gaussian KDE,
//! per-hour box statistics, and the moment summary.

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of histogram bins.
pub const HISTOGRAM_BINS: usize = 30;
/// Number of KDE curve samples.
pub const KDE_POINTS: usize = 200;

/// Quantile by linear interpolation between order statistics at rank
/// h = (n+1)p, clamped to [1, n]. On [-1, 0, 1] this puts the quartiles at
/// the observations themselves: (-1, 0, 1).
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile probability {p}");
    let n = sorted.len();
    let h = ((n + 1) as f64 * p).clamp(1.0, n as f64);
    let lo = (h.floor() as usize).min(n) - 1;
    let frac = h - h.floor();
    if frac == 0.0 || lo + 1 >= n {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// bins+1 edges; bin i covers [edges[i], edges[i+1]), last bin closed.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn histogram(values: &[f64], bins: usize) -> Histogram {
    let mut min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        // Degenerate spread; widen so every value lands in a real bin.
        min -= 0.5;
        max += 0.5;
    }
    let width = (max - min) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| min + width * i as f64).collect();
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Histogram { edges, counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdePoint {
    pub x: f64,
    pub density: f64,
}

/// Gaussian KDE with the Silverman bandwidth
/// 0.9 * min(std, IQR/1.34) * n^(-1/5), sampled on an even grid extended
/// three bandwidths past the data range.
fn kde_curve(values: &[f64], sorted: &[f64]) -> (f64, Vec<KdePoint>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let iqr = quantile_linear(sorted, 0.75) - quantile_linear(sorted, 0.25);
    let mut spread = std.min(iqr / 1.34);
    if spread == 0.0 {
        spread = std.max(iqr / 1.34);
    }
    let mut bandwidth = 0.9 * spread * n.powf(-0.2);
    if bandwidth <= 0.0 {
        // All residuals identical; keep the curve drawable as a sharp spike.
        bandwidth = 1e-9_f64.max(mean.abs() * 1e-12);
    }
    let lo = sorted[0] - 3.0 * bandwidth;
    let hi = sorted[sorted.len() - 1] + 3.0 * bandwidth;
    let step = (hi - lo) / (KDE_POINTS - 1) as f64;
    let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let curve = (0..KDE_POINTS)
        .map(|i| {
            let x = lo + step * i as f64;
            let density = values
                .iter()
                .map(|&v| {
                    let z = (x - v) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm;
            KdePoint { x, density }
        })
        .collect();
    (bandwidth, curve)
}

/// Box statistics of the residuals observed at one hour of the day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyBox {
    pub hour: u32,
    pub n: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    /// Smallest observation >= q1 - 1.5 IQR.
    pub lower_whisker: f64,
    /// Largest observation <= q3 + 1.5 IQR.
    pub upper_whisker: f64,
    pub outliers: Vec<f64>,
}

fn hourly_box(hour: u32, mut values: Vec<f64>) -> HourlyBox {
    values.sort_by(f64::total_cmp);
    let q1 = quantile_linear(&values, 0.25);
    let median = quantile_linear(&values, 0.50);
    let q3 = quantile_linear(&values, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let lower_whisker = values
        .iter()
        .copied()
        .find(|v| *v >= lo_fence)
        .unwrap_or(q1);
    let upper_whisker = values
        .iter()
        .rev()
        .copied()
        .find(|v| *v <= hi_fence)
        .unwrap_or(q3);
    let outliers = values
        .iter()
        .copied()
        .filter(|v| *v < lo_fence || *v > hi_fence)
        .collect();
    HourlyBox {
        hour,
        n: values.len(),
        q1,
        median,
        q3,
        lower_whisker,
        upper_whisker,
        outliers,
    }
}

/// Full residual analysis for one model on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub n: usize,
    pub mean: f64,
    /// Population (1/n) standard deviation.
    pub std: f64,
    /// Standardized third moment; 0 by convention when the spread is 0.
    pub skewness: f64,
    pub kde_bandwidth: f64,
    pub histogram: Histogram,
    pub kde: Vec<KdePoint>,
    /// One entry per hour of day present in the inputs, ascending.
    pub hourly: Vec<HourlyBox>,
    /// Raw residuals y - yhat, in input order. Not serialized; the
    /// prediction CSVs carry the full series.
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Residuals `y - yhat` with histogram, KDE, moments, and per-hour boxes.
pub fn residual_analysis(
    y: &[f64],
    yhat: &[f64],
    timestamps: &[DateTime<Utc>],
) -> Result<ResidualStats> {
    if y.len() != yhat.len() || y.len() != timestamps.len() {
        return Err(Error::Shape(format!(
            "residual inputs disagree: {} targets, {} predictions, {} timestamps",
            y.len(),
            yhat.len(),
            timestamps.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::Domain("residual analysis over no samples".into()));
    }
    let residuals: Vec<f64> = y.iter().zip(yhat).map(|(a, b)| a - b).collect();
    let n = residuals.len();
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let m2 = residuals.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n as f64;
    let m3 = residuals
        .iter()
        .map(|e| (e - mean) * (e - mean) * (e - mean))
        .sum::<f64>()
        / n as f64;
    let std = m2.sqrt();
    let skewness = if m2 == 0.0 { 0.0 } else { m3 / m2.powf(1.5) };

    let mut sorted = residuals.clone();
    sorted.sort_by(f64::total_cmp);
    let histogram = histogram(&residuals, HISTOGRAM_BINS);
    let (kde_bandwidth, kde) = kde_curve(&residuals, &sorted);

    let mut by_hour: Vec<Vec<f64>> = vec![Vec::new(); 24];
    for (e, ts) in residuals.iter().zip(timestamps) {
        by_hour[ts.hour() as usize].push(*e);
    }
    let hourly = by_hour
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(hour, v)| hourly_box(hour as u32, v))
        .collect();

    Ok(ResidualStats {
        n,
        mean,
        std,
        skewness,
        kde_bandwidth,
        histogram,
        kde,
        hourly,
        residuals,
    })
}
