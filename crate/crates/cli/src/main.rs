//! chronocast: hourly energy-consumption forecasting from the command line.
//!
//! Subcommands wire the pipeline end to end: generate a calibrated synthetic
//! dataset, prepare it into a model-ready bundle, train LSTM/GRU/FNN/ARIMA
//! forecasters, evaluate them on the held-out test split, produce single
//! forecasts, and run the four-model comparison report.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 data or schema
//! error, 3 numeric/convergence failure.

mod artifacts;
mod commands;
mod config;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use chronocast_core::error::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "chronocast",
    version,
    about = "Short-term hourly energy-consumption forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic hourly dataset calibrated to the target
    /// statistics.
    Generate(commands::generate::GenerateArgs),
    /// Impute, engineer features, split 70/15/15, scale, and window a raw
    /// CSV into a bundle.
    Prepare(commands::prepare::PrepareArgs),
    /// Train one model (or grid-search hyperparameters) on a bundle.
    Train(commands::train::TrainArgs),
    /// Evaluate a checkpoint on the bundle's test split.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Forecast the hour after a given timestamp.
    Forecast(commands::forecast::ForecastArgs),
    /// Train and compare all four models on one bundle.
    Report(commands::report::ReportArgs),
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Config(_)) => EXIT_USAGE,
        Some(
            CoreError::Numeric(_)
            | CoreError::Convergence(_)
            | CoreError::Divergence { .. }
            | CoreError::Search(_),
        ) => EXIT_NUMERIC,
        Some(_) => EXIT_DATA,
        // Config-file parse problems and missing required flags arrive as
        // plain anyhow context chains.
        None => {
            if err.downcast_ref::<serde_json::Error>().is_some() {
                EXIT_USAGE
            } else if err.downcast_ref::<std::io::Error>().is_some() {
                EXIT_DATA
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Prepare(args) => commands::prepare::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Forecast(args) => commands::forecast::run(args),
        Command::Report(args) => commands::report::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
