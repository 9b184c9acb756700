//! Short-term hourly energy-consumption forecasting engine.
//!
//! The crate covers the full workflow: synthetic data generation, CSV
//! ingestion and preprocessing, LSTM/GRU/FNN forecasters with hand-written
//! backpropagation through time, an ARIMA baseline fit by conditional least
//! squares, the training loop with early stopping and grid search, and the
//! evaluation suite (error metrics, confusion matrix over consumption bins,
//! residual analyses).

pub mod arima;
pub mod benchmark;
pub mod checkpoint;
pub mod error;
pub mod eval;
pub mod features;
pub mod frame;
pub mod metrics;
pub mod models;
pub mod nn;
pub mod pipeline;
pub mod residual;
pub mod synth;
pub mod train;
pub mod windows;

pub use error::{Error, Result};
