//! Fixed artifact filenames and the bundle read/write layer.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use chrono::{DateTime, TimeZone, Utc};
use chronocast_core::error::Error as CoreError;
use chronocast_core::eval::Evaluation;
use chronocast_core::features::{
    read_feature_csv, read_scaler_json, write_feature_csv, write_scaler_json,
};
use chronocast_core::frame::TIMESTAMP_FORMAT;
use chronocast_core::metrics::BIN_LABELS;
use chronocast_core::pipeline::{PreparedData, SplitManifest};
use chronocast_core::train::TrainHistory;
use chronocast_core::windows::make_windows;

use crate::svg;

// Bundle files.
pub const FEATURES_CSV: &str = "features.csv";
pub const SCALER_JSON: &str = "scaler.json";
pub const SPLITS_JSON: &str = "splits.json";
// Generate files.
pub const DATA_CSV: &str = "data.csv";
pub const STATS_JSON: &str = "stats.json";
// Train files.
pub const CHECKPOINT_JSON: &str = "checkpoint.json";
pub const HISTORY_CSV: &str = "history.csv";
pub const GRID_CSV: &str = "grid.csv";
// Evaluate files.
pub const METRICS_JSON: &str = "metrics.json";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const RESIDUAL_HISTOGRAM_CSV: &str = "residual_histogram.csv";
pub const RESIDUAL_KDE_CSV: &str = "residual_kde.csv";
pub const HOURLY_ERROR_BOX_CSV: &str = "hourly_error_box.csv";
pub const ERROR_OVER_TIME_CSV: &str = "error_over_time.csv";
pub const CONFUSION_CSV: &str = "confusion.csv";
pub const PREDICTIONS_SVG: &str = "predictions.svg";
pub const ERROR_OVER_TIME_SVG: &str = "error_over_time.svg";
pub const RESIDUAL_HISTOGRAM_SVG: &str = "residual_histogram.svg";
pub const ERROR_HISTOGRAM_SVG: &str = "error_histogram.svg";
// Report files.
pub const REPORT_TXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json_pretty<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_string(path, &text)
}

/// Persist a prepared dataset as the three-file bundle.
pub fn save_bundle(prepared: &PreparedData, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_feature_csv(&prepared.matrix, dir.join(FEATURES_CSV))?;
    write_scaler_json(&prepared.scaler, dir.join(SCALER_JSON))?;
    write_json_pretty(&dir.join(SPLITS_JSON), &prepared.manifest())?;
    Ok(())
}

/// Rebuild a prepared dataset from a bundle directory, verifying the scaler
/// digest recorded in the manifest.
pub fn load_bundle(dir: &Path) -> Result<PreparedData> {
    let manifest_path = dir.join(SPLITS_JSON);
    let manifest_text = std::fs::read_to_string(&manifest_path)
        .with_context(|| format!("cannot read {}", manifest_path.display()))?;
    let manifest: SplitManifest = serde_json::from_str(&manifest_text)
        .with_context(|| format!("invalid manifest {}", manifest_path.display()))?;

    let origin = parse_timestamp(&manifest.origin_timestamp)?;
    let matrix = read_feature_csv(dir.join(FEATURES_CSV), origin)?;
    if matrix.columns() != manifest.feature_registry.as_slice() {
        return Err(CoreError::Schema(
            "bundle features.csv header does not match the manifest registry".into(),
        )
        .into());
    }
    if matrix.n_rows() != manifest.n_rows {
        return Err(CoreError::Schema(format!(
            "bundle has {} feature rows, manifest says {}",
            matrix.n_rows(),
            manifest.n_rows
        ))
        .into());
    }
    let scaler = read_scaler_json(dir.join(SCALER_JSON), &manifest.feature_registry)?;
    if scaler.digest() != manifest.scaler_digest {
        return Err(CoreError::Compatibility(
            "bundle scaler does not match the digest in the manifest".into(),
        )
        .into());
    }
    let train = make_windows(&matrix, manifest.splits.train, manifest.window, manifest.horizon)?;
    let validation = make_windows(
        &matrix,
        manifest.splits.validation,
        manifest.window,
        manifest.horizon,
    )?;
    let test = make_windows(&matrix, manifest.splits.test, manifest.window, manifest.horizon)?;
    Ok(PreparedData {
        matrix,
        scaler,
        splits: manifest.splits,
        bin_edges: manifest.bin_edges,
        train,
        validation,
        test,
    })
}

pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>> {
    let naive = chrono::NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .with_context(|| format!("bad timestamp '{s}' (expected e.g. 2017-06-05T14:00:00Z)"))?;
    Ok(Utc.from_utc_datetime(&naive))
}

/// Write the per-epoch loss history.
pub fn write_history_csv(path: &Path, history: &TrainHistory) -> Result<()> {
    let mut out = String::from("epoch,train_loss,val_loss\n");
    for (i, (t, v)) in history
        .train_loss
        .iter()
        .zip(&history.val_loss)
        .enumerate()
    {
        let _ = writeln!(out, "{},{t},{v}", i + 1);
    }
    write_string(path, &out)
}

/// Write every evaluation artifact (CSVs and figures) into `dir`.
pub fn write_evaluation_artifacts(dir: &Path, eval: &Evaluation) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_json_pretty(&dir.join(METRICS_JSON), &eval.metrics)?;

    let preds = &eval.predictions;
    let mut csv = String::from("timestamp,actual_kwh,predicted_kwh\n");
    for i in 0..preds.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            preds.timestamps[i].format(TIMESTAMP_FORMAT),
            preds.actual_kwh[i],
            preds.predicted_kwh[i]
        );
    }
    write_string(&dir.join(PREDICTIONS_CSV), &csv)?;

    let mut csv = String::from("timestamp,residual_kwh\n");
    for (ts, e) in preds.timestamps.iter().zip(&eval.residuals.residuals) {
        let _ = writeln!(csv, "{},{e}", ts.format(TIMESTAMP_FORMAT));
    }
    write_string(&dir.join(ERROR_OVER_TIME_CSV), &csv)?;

    let hist = &eval.residuals.histogram;
    let mut csv = String::from("bin_start,bin_end,count\n");
    for (i, c) in hist.counts.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{c}", hist.edges[i], hist.edges[i + 1]);
    }
    write_string(&dir.join(RESIDUAL_HISTOGRAM_CSV), &csv)?;

    let mut csv = String::from("x,density\n");
    for p in &eval.residuals.kde {
        let _ = writeln!(csv, "{},{}", p.x, p.density);
    }
    write_string(&dir.join(RESIDUAL_KDE_CSV), &csv)?;

    let mut csv =
        String::from("hour,n,q1,median,q3,lower_whisker,upper_whisker,outliers\n");
    for b in &eval.residuals.hourly {
        let outliers = b
            .outliers
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{outliers}",
            b.hour, b.n, b.q1, b.median, b.q3, b.lower_whisker, b.upper_whisker
        );
    }
    write_string(&dir.join(HOURLY_ERROR_BOX_CSV), &csv)?;

    let mut csv = String::from("actual\\predicted,Low,Medium,High\n");
    for (r, label) in BIN_LABELS.iter().enumerate() {
        let row = eval.confusion.counts[r];
        let _ = writeln!(csv, "{label},{},{},{}", row[0], row[1], row[2]);
    }
    write_string(&dir.join(CONFUSION_CSV), &csv)?;

    // Figures. Predictions over the first week of the test split.
    let week = preds.len().min(168);
    let actual: Vec<(f64, f64)> = (0..week).map(|i| (i as f64, preds.actual_kwh[i])).collect();
    let predicted: Vec<(f64, f64)> = (0..week)
        .map(|i| (i as f64, preds.predicted_kwh[i]))
        .collect();
    svg::line_chart(
        "Actual vs predicted consumption (first test week)",
        "hour of test split",
        "kWh",
        &[
            svg::Series {
                label: "actual",
                color: "steelblue",
                points: &actual,
            },
            svg::Series {
                label: "predicted",
                color: "darkorange",
                points: &predicted,
            },
        ],
        &dir.join(PREDICTIONS_SVG),
    )?;

    let errors: Vec<(f64, f64)> = eval
        .residuals
        .residuals
        .iter()
        .enumerate()
        .map(|(i, e)| (i as f64, *e))
        .collect();
    svg::line_chart(
        "Forecast error over the test split",
        "hour of test split",
        "residual kWh",
        &[svg::Series {
            label: "residual",
            color: "indianred",
            points: &errors,
        }],
        &dir.join(ERROR_OVER_TIME_SVG),
    )?;

    let curve: Vec<(f64, f64)> = eval.residuals.kde.iter().map(|p| (p.x, p.density)).collect();
    svg::histogram_chart(
        "Residual histogram with density overlay",
        "residual kWh",
        &hist.edges,
        &hist.counts,
        Some(&curve),
        &dir.join(RESIDUAL_HISTOGRAM_SVG),
    )?;
    svg::histogram_chart(
        "Prediction error histogram",
        "residual kWh",
        &hist.edges,
        &hist.counts,
        None,
        &dir.join(ERROR_HISTOGRAM_SVG),
    )?;
    Ok(())
}
