//! The four-model comparison: trains LSTM, GRU, and FNN and fits ARIMA on
//! identical splits, then evaluates all of them on the same test windows.

use serde::{Deserialize, Serialize};

use crate::arima::{select_order_default, ArimaModel};
use crate::error::{Error, Result};
use crate::eval::{
    arima_test_predictions, evaluate_predictions, neural_test_predictions, Evaluation,
};
use crate::models::{init_params, ModelKind, NeuralParams};
use crate::pipeline::PreparedData;
use crate::train::{train, TrainConfig, TrainHistory};

/// Benchmark-wide settings; one seed drives every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub seed: u64,
    /// Epoch cap for the benchmark runs (recorded in the report).
    pub max_epochs: usize,
    pub batch_size: usize,
    pub patience: usize,
    pub learning_rate: f64,
    pub lstm_hidden: usize,
    pub lstm_dropout: f64,
    pub gru_hidden: usize,
    pub gru_dropout: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            seed: 42,
            max_epochs: 70,
            batch_size: 64,
            patience: 10,
            learning_rate: 1e-3,
            lstm_hidden: 50,
            lstm_dropout: 0.2,
            gru_hidden: 50,
            // The comparison regularizes only the proposed model; the GRU
            // baseline trains without dropout, like the FNN.
            gru_dropout: 0.0,
        }
    }
}

impl BenchmarkConfig {
    fn train_config(&self, model: ModelKind) -> TrainConfig {
        let (hidden, dropout) = match model {
            ModelKind::Lstm => (self.lstm_hidden, self.lstm_dropout),
            ModelKind::Gru => (self.gru_hidden, self.gru_dropout),
            _ => (0, 0.0),
        };
        TrainConfig {
            model,
            hidden,
            dropout,
            extra_dense: None,
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            patience: self.patience,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }
}

/// Fitted-order summary for the ARIMA row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaSummary {
    pub order: crate::arima::ArimaOrder,
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub aic: f64,
}

/// One model's row in the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub model: ModelKind,
    /// Failure annotation; None means the run completed.
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub history: Option<TrainHistory>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arima: Option<ArimaSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluation: Option<Evaluation>,
}

impl ModelOutcome {
    fn failed(model: ModelKind, err: &Error) -> Self {
        ModelOutcome {
            model,
            failure: Some(err.to_string()),
            history: None,
            arima: None,
            evaluation: None,
        }
    }
}

/// The comparison report. Rows follow the baseline-to-proposed order:
/// ARIMA, FNN, GRU, LSTM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub n_test_samples: usize,
    pub bin_edges: (f64, f64),
    pub models: Vec<ModelOutcome>,
}

impl BenchmarkReport {
    pub fn outcome(&self, model: ModelKind) -> Option<&ModelOutcome> {
        self.models.iter().find(|m| m.model == model)
    }

    pub fn all_completed(&self) -> bool {
        self.models.iter().all(|m| m.failure.is_none())
    }
}

/// Artifacts of one completed neural run inside the benchmark.
pub struct TrainedModel {
    pub params: NeuralParams,
    pub history: TrainHistory,
}

/// Outputs the report plus the trained models/fits so callers can persist
/// checkpoints and per-model artifacts.
pub struct BenchmarkRun {
    pub report: BenchmarkReport,
    pub lstm: Option<TrainedModel>,
    pub gru: Option<TrainedModel>,
    pub fnn: Option<TrainedModel>,
    pub arima: Option<ArimaModel>,
}

fn run_neural(
    kind: ModelKind,
    prepared: &PreparedData,
    cfg: &BenchmarkConfig,
) -> Result<(TrainedModel, Evaluation)> {
    let tc = cfg.train_config(kind);
    let params = init_params(
        kind,
        prepared.train.features(),
        prepared.train.window(),
        tc.hidden.max(1),
        tc.dropout,
        tc.extra_dense,
        tc.seed,
    )?;
    let (best, history) = train(&tc, params, &prepared.train, &prepared.validation)?;
    let preds = neural_test_predictions(&best, prepared)?;
    let evaluation = evaluate_predictions(preds, prepared)?;
    Ok((
        TrainedModel {
            params: best,
            history,
        },
        evaluation,
    ))
}

fn run_arima(prepared: &PreparedData) -> Result<(ArimaModel, Evaluation)> {
    let series = prepared.matrix.column("consumption")?;
    let train_series = &series[prepared.splits.train.as_range()];
    let (_, model) = select_order_default(train_series)?;
    let preds = arima_test_predictions(&model, prepared)?;
    let evaluation = evaluate_predictions(preds, prepared)?;
    Ok((model, evaluation))
}

/// Train/fit all four models on identical splits and evaluate them on the
/// same test windows. Per-model failures annotate the report instead of
/// aborting the rest.
pub fn run_benchmark(prepared: &PreparedData, cfg: &BenchmarkConfig) -> BenchmarkRun {
    let mut run = BenchmarkRun {
        report: BenchmarkReport {
            config: *cfg,
            n_test_samples: prepared.test.len(),
            bin_edges: prepared.bin_edges,
            models: Vec::with_capacity(4),
        },
        lstm: None,
        gru: None,
        fnn: None,
        arima: None,
    };

    match run_arima(prepared) {
        Ok((model, evaluation)) => {
            run.report.models.push(ModelOutcome {
                model: ModelKind::Arima,
                failure: None,
                history: None,
                arima: Some(ArimaSummary {
                    order: model.order,
                    intercept: model.intercept,
                    ar: model.ar.clone(),
                    ma: model.ma.clone(),
                    aic: model.diagnostics.aic,
                }),
                evaluation: Some(evaluation),
            });
            run.arima = Some(model);
        }
        Err(e) => run
            .report
            .models
            .push(ModelOutcome::failed(ModelKind::Arima, &e)),
    }

    for kind in [ModelKind::Fnn, ModelKind::Gru, ModelKind::Lstm] {
        match run_neural(kind, prepared, cfg) {
            Ok((trained, evaluation)) => {
                run.report.models.push(ModelOutcome {
                    model: kind,
                    failure: None,
                    history: Some(trained.history.clone()),
                    arima: None,
                    evaluation: Some(evaluation),
                });
                match kind {
                    ModelKind::Lstm => run.lstm = Some(trained),
                    ModelKind::Gru => run.gru = Some(trained),
                    ModelKind::Fnn => run.fnn = Some(trained),
                    ModelKind::Arima => unreachable!(),
                }
            }
            Err(e) => run.report.models.push(ModelOutcome::failed(kind, &e)),
        }
    }
    run
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"))
}

/// Human-readable comparison table: MAE/RMSE on the normalized scale, MAPE
/// on the original kWh scale, r and R-squared.
pub fn render_table(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Model performance on the test set ({} samples, seed {}, epoch cap {})\n",
        report.n_test_samples, report.config.seed, report.config.max_epochs
    ));
    out.push_str(&format!(
        "{:<16} {:>10} {:>11} {:>11} {:>8} {:>8}\n",
        "Model", "MAE(norm)", "RMSE(norm)", "MAPE%(kWh)", "r", "R^2"
    ));
    for row in &report.models {
        let name = match row.model {
            ModelKind::Arima => "ARIMA",
            ModelKind::Fnn => "FNN",
            ModelKind::Gru => "GRU",
            ModelKind::Lstm => "LSTM (proposed)",
        };
        match (&row.failure, &row.evaluation) {
            (Some(err), _) => {
                out.push_str(&format!("{name:<16} FAILED: {err}\n"));
            }
            (None, Some(eval)) => {
                out.push_str(&format!(
                    "{:<16} {:>10.4} {:>11.4} {:>11} {:>8.4} {:>8.4}\n",
                    name,
                    eval.metrics.normalized.mae,
                    eval.metrics.normalized.rmse,
                    fmt_opt(eval.metrics.original_kwh.mape_percent),
                    eval.metrics.original_kwh.pearson_r,
                    eval.metrics.original_kwh.r_squared,
                ));
            }
            (None, None) => out.push_str(&format!("{name:<16} (no evaluation)\n")),
        }
    }
    if let Some(arima) = report
        .outcome(ModelKind::Arima)
        .and_then(|m| m.arima.as_ref())
    {
        out.push_str(&format!(
            "ARIMA order selected by AIC: ({},{},{})\n",
            arima.order.p, arima.order.d, arima.order.q
        ));
    }
    out
}
