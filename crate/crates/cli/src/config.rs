//! Flat JSON run configuration. Every key has a command-line flag; flags
//! override file values; `CHRONOCAST_SEED` is the last-resort seed default.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

/// The environment variable consulted when neither flag nor file set a seed.
pub const SEED_ENV: &str = "CHRONOCAST_SEED";
/// Built-in seed when nothing else specifies one.
pub const DEFAULT_SEED: u64 = 42;

/// Union of every configurable key across the subcommands. Unknown keys in
/// the file are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    // synthetic generator
    pub n_hours: Option<usize>,
    pub base_load: Option<f64>,
    pub daily_amplitude: Option<f64>,
    pub weekly_amplitude: Option<f64>,
    pub annual_amplitude: Option<f64>,
    pub temp_coupling: Option<f64>,
    pub noise_std: Option<f64>,
    // paths
    pub data: Option<PathBuf>,
    pub bundle: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    // model / training
    pub model: Option<String>,
    pub hidden: Option<usize>,
    pub dropout: Option<f64>,
    pub extra_dense: Option<usize>,
    pub batch_size: Option<usize>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub learning_rate: Option<f64>,
    pub grid: Option<bool>,
    // evaluation / forecasting / reporting
    pub at: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: FileConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        Ok(cfg)
    }
}

/// flag > file > env (seed only) > default.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            let parsed: u64 = v
                .parse()
                .with_context(|| format!("{SEED_ENV}='{v}' is not a valid seed"))?;
            Ok(parsed)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => bail!("cannot read {SEED_ENV}: {e}"),
    }
}

/// flag > file > default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// flag > file, both optional.
pub fn pick_opt<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// A required path that may come from flag or file.
pub fn require_path(flag: Option<PathBuf>, file: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    pick_opt(flag, file).with_context(|| format!("missing required {what} (flag or config key)"))
}
