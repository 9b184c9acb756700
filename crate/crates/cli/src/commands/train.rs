//! `chronocast train`: fit one model (or grid-search the recurrent
//! hyperparameters) on a prepared bundle.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use chronocast_core::arima::select_order_default;
use chronocast_core::checkpoint::{save_checkpoint, Checkpoint};
use chronocast_core::models::{init_params, ModelKind};
use chronocast_core::train::{grid_search, train, GridRow, GridSpace, TrainConfig};

use crate::artifacts::{
    load_bundle, write_history_csv, write_string, CHECKPOINT_JSON, GRID_CSV, HISTORY_CSV,
};
use crate::config::{pick, pick_opt, require_path, resolve_seed, FileConfig};

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared bundle directory.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    /// Output directory for checkpoint.json and history.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model kind: lstm, gru, fnn, or arima.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Width of the optional extra dense ReLU layer on the LSTM head.
    #[arg(long)]
    pub extra_dense: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run the default hyperparameter grid search instead of one fit.
    #[arg(long)]
    pub grid: bool,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn grid_table_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("hidden,dropout,batch_size,learning_rate,val_loss,error\n");
    for r in rows {
        let val = r.val_loss.map(|v| v.to_string()).unwrap_or_default();
        let err = r.error.clone().unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{val},{err}",
            r.hidden, r.dropout, r.batch_size, r.learning_rate
        );
    }
    out
}

pub fn run(args: TrainArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let bundle_dir = require_path(args.bundle, file.bundle, "--bundle directory")?;
    let out = require_path(args.out, file.out, "--out directory")?;
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;

    let kind: ModelKind = pick(args.model, file.model, "lstm".to_string()).parse()?;
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        model: kind,
        hidden: pick(args.hidden, file.hidden, defaults.hidden),
        dropout: pick(args.dropout, file.dropout, defaults.dropout),
        extra_dense: pick_opt(args.extra_dense, file.extra_dense),
        batch_size: pick(args.batch_size, file.batch_size, defaults.batch_size),
        max_epochs: pick(args.max_epochs, file.max_epochs, defaults.max_epochs),
        patience: pick(args.patience, file.patience, defaults.patience),
        learning_rate: pick(args.learning_rate, file.learning_rate, defaults.learning_rate),
        seed: resolve_seed(args.seed, file.seed)?,
    };
    let grid = args.grid || file.grid.unwrap_or(false);

    let prepared = load_bundle(&bundle_dir)?;
    let digest = prepared.scaler.digest();
    let registry = prepared.matrix.columns().to_vec();
    let window = prepared.train.window();

    if kind == ModelKind::Arima {
        let series = prepared.matrix.column("consumption")?;
        let train_series = &series[prepared.splits.train.as_range()];
        let (order, model) = select_order_default(train_series)?;
        let ckpt = Checkpoint::from_arima(
            &model,
            window,
            prepared.train.features(),
            digest,
            registry,
            config.seed,
        );
        save_checkpoint(&ckpt, out.join(CHECKPOINT_JSON))?;
        println!(
            "fitted arima ({},{},{}) by conditional least squares; aic {:.3}; checkpoint in {}",
            order.p,
            order.d,
            order.q,
            model.diagnostics.aic,
            out.display()
        );
        return Ok(());
    }

    if grid {
        let outcome = grid_search(&config, &GridSpace::default(), &prepared.train, &prepared.validation)?;
        write_string(&out.join(GRID_CSV), &grid_table_csv(&outcome.table))?;
        let ckpt = Checkpoint::from_neural(
            &outcome.best_params,
            window,
            digest,
            registry,
            outcome.best_config.seed,
        );
        save_checkpoint(&ckpt, out.join(CHECKPOINT_JSON))?;
        write_history_csv(&out.join(HISTORY_CSV), &outcome.best_history)?;
        println!(
            "grid search over {} combinations; best: hidden {}, dropout {}, batch {}, lr {} (val mse {:.6})",
            outcome.table.len(),
            outcome.best_config.hidden,
            outcome.best_config.dropout,
            outcome.best_config.batch_size,
            outcome.best_config.learning_rate,
            outcome.best_history.best_val_loss()
        );
        return Ok(());
    }

    let params = init_params(
        kind,
        prepared.train.features(),
        window,
        config.hidden,
        config.dropout,
        config.extra_dense,
        config.seed,
    )?;
    let (best, history) = train(&config, params, &prepared.train, &prepared.validation)?;
    let ckpt = Checkpoint::from_neural(&best, window, digest, registry, config.seed);
    save_checkpoint(&ckpt, out.join(CHECKPOINT_JSON))?;
    write_history_csv(&out.join(HISTORY_CSV), &history)?;
    println!(
        "trained {kind} for {} epochs (best epoch {}, val mse {:.6}); artifacts in {}",
        history.epochs_run(),
        history.best_epoch,
        history.best_val_loss(),
        out.display()
    );
    Ok(())
}
