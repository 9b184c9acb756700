//! `chronocast report`: the four-model comparison on a prepared bundle,
//! with per-model artifact directories.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use chronocast_core::benchmark::{render_table, run_benchmark, BenchmarkConfig};
use chronocast_core::checkpoint::{save_checkpoint, Checkpoint};
use chronocast_core::models::ModelKind;

use crate::artifacts::{
    load_bundle, write_evaluation_artifacts, write_history_csv, write_json_pretty, write_string,
    CHECKPOINT_JSON, HISTORY_CSV, REPORT_JSON, REPORT_TXT,
};
use crate::config::{pick, resolve_seed, require_path, FileConfig};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Prepared bundle directory.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Output directory for the report and per-model artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Epoch cap for the benchmark training runs (recorded in the report).
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Hidden units for both recurrent models.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Dropout for both recurrent models.
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Stdout format: text (default) or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: ReportArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let bundle_dir = require_path(args.bundle, file.bundle, "--bundle directory")?;
    let out = require_path(args.out, file.out, "--out directory")?;
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let format = pick(args.format, file.format, "text".to_string());
    if format != "text" && format != "json" {
        return Err(chronocast_core::Error::Config(format!(
            "--format must be 'text' or 'json', got '{format}'"
        ))
        .into());
    }

    let defaults = BenchmarkConfig::default();
    let hidden = pick(args.hidden, file.hidden, defaults.lstm_hidden);
    let dropout = pick(args.dropout, file.dropout, defaults.lstm_dropout);
    let cfg = BenchmarkConfig {
        seed: resolve_seed(args.seed, file.seed)?,
        max_epochs: pick(args.max_epochs, file.max_epochs, defaults.max_epochs),
        batch_size: pick(args.batch_size, file.batch_size, defaults.batch_size),
        patience: pick(args.patience, file.patience, defaults.patience),
        learning_rate: pick(args.learning_rate, file.learning_rate, defaults.learning_rate),
        lstm_hidden: hidden,
        lstm_dropout: dropout,
        gru_hidden: hidden,
        gru_dropout: dropout,
    };

    let prepared = load_bundle(&bundle_dir)?;
    let digest = prepared.scaler.digest();
    let registry = prepared.matrix.columns().to_vec();
    let window = prepared.train.window();

    let run = run_benchmark(&prepared, &cfg);
    let table = render_table(&run.report);
    write_string(&out.join(REPORT_TXT), &table)?;
    write_json_pretty(&out.join(REPORT_JSON), &run.report)?;

    // Per-model artifact directories for every completed model.
    for outcome in &run.report.models {
        let Some(evaluation) = &outcome.evaluation else {
            continue;
        };
        let dir = out.join(outcome.model.to_string());
        write_evaluation_artifacts(&dir, evaluation)?;
        if let Some(history) = &outcome.history {
            write_history_csv(&dir.join(HISTORY_CSV), history)?;
        }
        let ckpt = match outcome.model {
            ModelKind::Arima => run.arima.as_ref().map(|m| {
                Checkpoint::from_arima(
                    m,
                    window,
                    prepared.train.features(),
                    digest.clone(),
                    registry.clone(),
                    cfg.seed,
                )
            }),
            ModelKind::Lstm => run.lstm.as_ref().map(|t| {
                Checkpoint::from_neural(&t.params, window, digest.clone(), registry.clone(), cfg.seed)
            }),
            ModelKind::Gru => run.gru.as_ref().map(|t| {
                Checkpoint::from_neural(&t.params, window, digest.clone(), registry.clone(), cfg.seed)
            }),
            ModelKind::Fnn => run.fnn.as_ref().map(|t| {
                Checkpoint::from_neural(&t.params, window, digest.clone(), registry.clone(), cfg.seed)
            }),
        };
        if let Some(ckpt) = ckpt {
            save_checkpoint(&ckpt, dir.join(CHECKPOINT_JSON))?;
        }
    }

    if format == "json" {
        let mut text = serde_json::to_string_pretty(&run.report)?;
        text.push('\n');
        print!("{text}");
    } else {
        print!("{table}");
    }

    if !run.report.all_completed() {
        let failed: Vec<String> = run
            .report
            .models
            .iter()
            .filter_map(|m| m.failure.as_ref().map(|e| format!("{}: {e}", m.model)))
            .collect();
        return Err(chronocast_core::Error::Numeric(format!(
            "{} of 4 models failed: {}",
            failed.len(),
            failed.join("; ")
        ))
        .into());
    }
    Ok(())
}
