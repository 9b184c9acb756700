//! `chronocast prepare`: raw CSV to the prepared dataset bundle.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use chronocast_core::frame::load_csv;
use chronocast_core::pipeline::prepare;

use crate::artifacts::save_bundle;
use crate::config::{require_path, FileConfig};

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Raw hourly CSV in the ingestion schema.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Output bundle directory (features.csv, scaler.json, splits.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: PrepareArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let data = require_path(args.data, file.data, "--data CSV path")?;
    let out = require_path(args.out, file.out, "--out directory")?;

    let frame = load_csv(&data)?;
    let prepared = prepare(&frame)?;
    save_bundle(&prepared, &out)?;
    println!(
        "prepared {} feature rows -> splits {}/{}/{} (windows {}/{}/{}) in {}",
        prepared.matrix.n_rows(),
        prepared.splits.train.len(),
        prepared.splits.validation.len(),
        prepared.splits.test.len(),
        prepared.train.len(),
        prepared.validation.len(),
        prepared.test.len(),
        out.display()
    );
    Ok(())
}
