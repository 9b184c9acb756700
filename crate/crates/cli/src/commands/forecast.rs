//! `chronocast forecast`: one-step-ahead prediction for the hour after a
//! given timestamp, using a checkpoint plus raw history.

use std::path::PathBuf;

use anyhow::Result;
use chrono::Duration;
use clap::Args;

use chronocast_core::checkpoint::load_checkpoint;
use chronocast_core::error::Error as CoreError;
use chronocast_core::features::{apply_scale, engineer_features, read_scaler_json};
use chronocast_core::frame::{impute_linear, load_csv, TIMESTAMP_FORMAT};
use chronocast_core::models::{Mode, ModelKind, SequenceModel};
use chronocast_core::pipeline::SplitManifest;
use chronocast_core::windows::SeqWindow;

use crate::artifacts::{parse_timestamp, SCALER_JSON, SPLITS_JSON};
use crate::config::{pick_opt, require_path, FileConfig};

/// Hours of history a forecast needs before the anchor timestamp: the
/// longest lag (168) plus the 24-hour input window.
pub const REQUIRED_HISTORY_HOURS: usize = 192;

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Bundle directory providing the scaler and feature registry.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Checkpoint JSON produced by `train`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Raw hourly CSV holding the history (ingestion schema).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Anchor timestamp (e.g. 2017-06-05T14:00:00Z); the forecast targets
    /// the hour after it.
    #[arg(long)]
    pub at: Option<String>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: ForecastArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let bundle_dir = require_path(args.bundle, file.bundle, "--bundle directory")?;
    let ckpt_path = require_path(args.checkpoint, file.checkpoint, "--checkpoint path")?;
    let data = require_path(args.data, file.data, "--data CSV path")?;
    let at = pick_opt(args.at, file.at)
        .ok_or_else(|| CoreError::Config("missing --at timestamp".into()))?;
    let at = parse_timestamp(&at)?;

    let manifest: SplitManifest =
        serde_json::from_str(&std::fs::read_to_string(bundle_dir.join(SPLITS_JSON))?)?;
    let scaler = read_scaler_json(bundle_dir.join(SCALER_JSON), &manifest.feature_registry)?;
    let ckpt = load_checkpoint(&ckpt_path)?;
    ckpt.check_compatibility(&scaler.digest(), &manifest.feature_registry)?;

    let frame = load_csv(&data)?;
    let have_anchor = frame.timestamps.binary_search(&at).is_ok();
    let first = frame.timestamps.first().copied();
    let span_ok = first
        .map(|f| (at - f).num_hours() >= REQUIRED_HISTORY_HOURS as i64 - 1)
        .unwrap_or(false);
    if !have_anchor || !span_ok {
        return Err(CoreError::Domain(format!(
            "forecasting the hour after {} needs {REQUIRED_HISTORY_HOURS} hours of history \
             ending at that timestamp (lag 168 + window {})",
            at.format(TIMESTAMP_FORMAT),
            manifest.window,
        ))
        .into());
    }

    let imputed = impute_linear(&frame)?;
    let matrix = engineer_features(&imputed)?;
    let scaled = apply_scale(&matrix, &scaler)?;
    let row = scaled
        .timestamps
        .binary_search(&at)
        .map_err(|_| CoreError::Domain("anchor timestamp lost during preparation".into()))?;
    if row + 1 < manifest.window {
        return Err(CoreError::Domain(format!(
            "only {} feature rows precede {}, need {}",
            row + 1,
            at.format(TIMESTAMP_FORMAT),
            manifest.window
        ))
        .into());
    }

    let predicted_scaled = match ckpt.model_kind {
        ModelKind::Arima => {
            let series = scaled.column("consumption")?;
            chronocast_core::arima::forecast_one_step(&ckpt.to_arima()?, &series[..=row])?
        }
        _ => {
            let params = ckpt.to_neural()?;
            let start = row + 1 - manifest.window;
            let ncols = scaled.n_cols();
            let data: Vec<f64> = (start..=row).flat_map(|r| scaled.row(r).to_vec()).collect();
            let window = SeqWindow::new(&data, manifest.window, ncols)?;
            let mut rng = rand_stub();
            params.predict(window, Mode::Eval, &mut rng)?
        }
    };
    let predicted_kwh = scaler.invert_value(predicted_scaled, "consumption")?;
    let target_ts = at + Duration::hours(1);
    println!(
        "forecast for {}: {predicted_kwh:.3} kWh (scaled {predicted_scaled:.6})",
        target_ts.format(TIMESTAMP_FORMAT)
    );
    Ok(())
}

/// Eval-mode forwards never draw from the rng; any deterministic source works.
fn rand_stub() -> impl rand::RngCore {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(0)
}
