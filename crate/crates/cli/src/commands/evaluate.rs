//! `chronocast evaluate`: score a checkpoint on the bundle's test split and
//! emit the metric, residual, and confusion artifacts plus figures.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use chronocast_core::checkpoint::load_checkpoint;
use chronocast_core::eval::{
    arima_test_predictions, evaluate_predictions, neural_test_predictions,
};
use chronocast_core::models::ModelKind;

use crate::artifacts::{load_bundle, write_evaluation_artifacts};
use crate::config::{require_path, FileConfig};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Prepared bundle directory.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Checkpoint JSON produced by `train`.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Output directory for the evaluation artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let bundle_dir = require_path(args.bundle, file.bundle, "--bundle directory")?;
    let ckpt_path = require_path(args.checkpoint, file.checkpoint, "--checkpoint path")?;
    let out = require_path(args.out, file.out, "--out directory")?;
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;

    let prepared = load_bundle(&bundle_dir)?;
    let ckpt = load_checkpoint(&ckpt_path)?;
    ckpt.check_compatibility(&prepared.scaler.digest(), prepared.matrix.columns())?;

    let predictions = match ckpt.model_kind {
        ModelKind::Arima => arima_test_predictions(&ckpt.to_arima()?, &prepared)?,
        _ => neural_test_predictions(&ckpt.to_neural()?, &prepared)?,
    };
    let evaluation = evaluate_predictions(predictions, &prepared)?;
    write_evaluation_artifacts(&out, &evaluation)?;

    let m = &evaluation.metrics;
    println!(
        "{} on {} test samples: normalized mae {:.4} rmse {:.4}; kWh mape {}; r {:.4}; R^2 {:.4}",
        ckpt.model_kind,
        m.n,
        m.normalized.mae,
        m.normalized.rmse,
        m.original_kwh
            .mape_percent
            .map(|v| format!("{v:.2}%"))
            .unwrap_or_else(|| "n/a".into()),
        m.original_kwh.pearson_r,
        m.original_kwh.r_squared
    );
    Ok(())
}
