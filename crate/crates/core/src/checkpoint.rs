//! Model checkpoints: a single JSON envelope for all four model kinds.
//!
//! Layout: format_version, model_kind, hyperparameters, per-block parameter
//! arrays, the scaler digest (so stale checkpoints fail loudly against a
//! different bundle), the feature registry, and the training seed.
//! Load followed by save reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arima::{ArimaModel, ArimaOrder, FitDiagnostics};
use crate::error::{Error, Result};
use crate::models::{FnnParams, GruParams, LstmParams, ModelKind, NeuralParams, SequenceModel};
use crate::nn::dense::DenseParams;
use crate::nn::linalg::Matrix;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamBlock {
    Matrix {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    Vector(Vec<f64>),
    Scalar(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub window: usize,
    pub features: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hidden: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dropout: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub extra_dense: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arima_order: Option<ArimaOrder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub model_kind: ModelKind,
    pub hyperparameters: Hyperparameters,
    pub params: BTreeMap<String, ParamBlock>,
    pub scaler_digest: String,
    pub feature_registry: Vec<String>,
    pub seed: u64,
}

fn matrix_block(m: &Matrix) -> ParamBlock {
    ParamBlock::Matrix {
        rows: m.rows(),
        cols: m.cols(),
        data: m.as_slice().to_vec(),
    }
}

fn dense_blocks(map: &mut BTreeMap<String, ParamBlock>, prefix: &str, d: &DenseParams) {
    map.insert(format!("{prefix}_weights"), matrix_block(&d.weights));
    map.insert(format!("{prefix}_bias"), ParamBlock::Vector(d.bias.clone()));
}

fn take_matrix(
    map: &mut BTreeMap<String, ParamBlock>,
    key: &str,
    rows: usize,
    cols: usize,
) -> Result<Matrix> {
    match map.remove(key) {
        Some(ParamBlock::Matrix {
            rows: r,
            cols: c,
            data,
        }) => {
            if r != rows || c != cols {
                return Err(Error::Shape(format!(
                    "checkpoint block '{key}' is {r}x{c}, expected {rows}x{cols}"
                )));
            }
            Matrix::from_vec(rows, cols, data)
        }
        Some(_) => Err(Error::Schema(format!(
            "checkpoint block '{key}' is not a matrix"
        ))),
        None => Err(Error::Schema(format!("checkpoint missing block '{key}'"))),
    }
}

fn take_vector(map: &mut BTreeMap<String, ParamBlock>, key: &str, len: usize) -> Result<Vec<f64>> {
    match map.remove(key) {
        Some(ParamBlock::Vector(v)) => {
            if v.len() != len {
                return Err(Error::Shape(format!(
                    "checkpoint block '{key}' has length {}, expected {len}",
                    v.len()
                )));
            }
            Ok(v)
        }
        Some(_) => Err(Error::Schema(format!(
            "checkpoint block '{key}' is not a vector"
        ))),
        None => Err(Error::Schema(format!("checkpoint missing block '{key}'"))),
    }
}

fn take_scalar(map: &mut BTreeMap<String, ParamBlock>, key: &str) -> Result<f64> {
    match map.remove(key) {
        Some(ParamBlock::Scalar(v)) => Ok(v),
        Some(_) => Err(Error::Schema(format!(
            "checkpoint block '{key}' is not a scalar"
        ))),
        None => Err(Error::Schema(format!("checkpoint missing block '{key}'"))),
    }
}

fn take_dense(
    map: &mut BTreeMap<String, ParamBlock>,
    prefix: &str,
    out_dim: usize,
    in_dim: usize,
) -> Result<DenseParams> {
    Ok(DenseParams {
        weights: take_matrix(map, &format!("{prefix}_weights"), out_dim, in_dim)?,
        bias: take_vector(map, &format!("{prefix}_bias"), out_dim)?,
    })
}

impl Checkpoint {
    pub fn from_neural(
        params: &NeuralParams,
        window: usize,
        scaler_digest: String,
        feature_registry: Vec<String>,
        seed: u64,
    ) -> Self {
        let mut map = BTreeMap::new();
        let hyper = match params {
            NeuralParams::Lstm(p) => {
                for (name, m) in [
                    ("w_input", &p.w_input),
                    ("u_input", &p.u_input),
                    ("w_forget", &p.w_forget),
                    ("u_forget", &p.u_forget),
                    ("w_cand", &p.w_cand),
                    ("u_cand", &p.u_cand),
                    ("w_outgate", &p.w_outgate),
                    ("u_outgate", &p.u_outgate),
                ] {
                    map.insert(name.to_string(), matrix_block(m));
                }
                for (name, b) in [
                    ("b_input", &p.b_input),
                    ("b_forget", &p.b_forget),
                    ("b_cand", &p.b_cand),
                    ("b_outgate", &p.b_outgate),
                ] {
                    map.insert(name.to_string(), ParamBlock::Vector(b.clone()));
                }
                if let Some(extra) = &p.extra {
                    dense_blocks(&mut map, "extra", extra);
                }
                dense_blocks(&mut map, "head", &p.head);
                Hyperparameters {
                    window,
                    features: p.input_dim,
                    hidden: Some(p.hidden),
                    dropout: Some(p.dropout),
                    extra_dense: p.extra.as_ref().map(DenseParams::out_dim),
                    arima_order: None,
                }
            }
            NeuralParams::Gru(p) => {
                for (name, m) in [
                    ("w_update", &p.w_update),
                    ("u_update", &p.u_update),
                    ("w_reset", &p.w_reset),
                    ("u_reset", &p.u_reset),
                    ("w_cand", &p.w_cand),
                    ("u_cand", &p.u_cand),
                ] {
                    map.insert(name.to_string(), matrix_block(m));
                }
                for (name, b) in [
                    ("b_update", &p.b_update),
                    ("b_reset", &p.b_reset),
                    ("b_cand", &p.b_cand),
                ] {
                    map.insert(name.to_string(), ParamBlock::Vector(b.clone()));
                }
                dense_blocks(&mut map, "head", &p.head);
                Hyperparameters {
                    window,
                    features: p.input_dim,
                    hidden: Some(p.hidden),
                    dropout: Some(p.dropout),
                    extra_dense: None,
                    arima_order: None,
                }
            }
            NeuralParams::Fnn(p) => {
                dense_blocks(&mut map, "hidden1", &p.hidden1);
                dense_blocks(&mut map, "hidden2", &p.hidden2);
                dense_blocks(&mut map, "head", &p.head);
                Hyperparameters {
                    window,
                    features: p.input_dim / window,
                    hidden: Some(p.hidden1.out_dim()),
                    dropout: None,
                    extra_dense: None,
                    arima_order: None,
                }
            }
        };
        Checkpoint {
            format_version: FORMAT_VERSION,
            model_kind: params.kind(),
            hyperparameters: hyper,
            params: map,
            scaler_digest,
            feature_registry,
            seed,
        }
    }

    pub fn from_arima(
        model: &ArimaModel,
        window: usize,
        features: usize,
        scaler_digest: String,
        feature_registry: Vec<String>,
        seed: u64,
    ) -> Self {
        let mut map = BTreeMap::new();
        map.insert("intercept".into(), ParamBlock::Scalar(model.intercept));
        map.insert("ar".into(), ParamBlock::Vector(model.ar.clone()));
        map.insert("ma".into(), ParamBlock::Vector(model.ma.clone()));
        map.insert(
            "residual_variance".into(),
            ParamBlock::Scalar(model.residual_variance),
        );
        map.insert("ssr".into(), ParamBlock::Scalar(model.diagnostics.ssr));
        map.insert("aic".into(), ParamBlock::Scalar(model.diagnostics.aic));
        map.insert(
            "n_eff".into(),
            ParamBlock::Scalar(model.diagnostics.n_eff as f64),
        );
        map.insert(
            "iterations".into(),
            ParamBlock::Scalar(model.diagnostics.iterations as f64),
        );
        Checkpoint {
            format_version: FORMAT_VERSION,
            model_kind: ModelKind::Arima,
            hyperparameters: Hyperparameters {
                window,
                features,
                hidden: None,
                dropout: None,
                extra_dense: None,
                arima_order: Some(model.order),
            },
            params: map,
            scaler_digest,
            feature_registry,
            seed,
        }
    }

    /// Rebuild neural parameters, validating every block shape.
    pub fn to_neural(&self) -> Result<NeuralParams> {
        let hyper = &self.hyperparameters;
        let features = hyper.features;
        let mut map = self.params.clone();
        match self.model_kind {
            ModelKind::Lstm => {
                let hidden = hyper
                    .hidden
                    .ok_or_else(|| Error::Schema("lstm checkpoint missing hidden size".into()))?;
                let extra = match hyper.extra_dense {
                    Some(units) => Some(take_dense(&mut map, "extra", units, hidden)?),
                    None => None,
                };
                let head_in = hyper.extra_dense.unwrap_or(hidden);
                Ok(NeuralParams::Lstm(LstmParams {
                    input_dim: features,
                    hidden,
                    dropout: hyper.dropout.unwrap_or(0.0),
                    w_input: take_matrix(&mut map, "w_input", hidden, features)?,
                    u_input: take_matrix(&mut map, "u_input", hidden, hidden)?,
                    b_input: take_vector(&mut map, "b_input", hidden)?,
                    w_forget: take_matrix(&mut map, "w_forget", hidden, features)?,
                    u_forget: take_matrix(&mut map, "u_forget", hidden, hidden)?,
                    b_forget: take_vector(&mut map, "b_forget", hidden)?,
                    w_cand: take_matrix(&mut map, "w_cand", hidden, features)?,
                    u_cand: take_matrix(&mut map, "u_cand", hidden, hidden)?,
                    b_cand: take_vector(&mut map, "b_cand", hidden)?,
                    w_outgate: take_matrix(&mut map, "w_outgate", hidden, features)?,
                    u_outgate: take_matrix(&mut map, "u_outgate", hidden, hidden)?,
                    b_outgate: take_vector(&mut map, "b_outgate", hidden)?,
                    extra,
                    head: take_dense(&mut map, "head", 1, head_in)?,
                }))
            }
            ModelKind::Gru => {
                let hidden = hyper
                    .hidden
                    .ok_or_else(|| Error::Schema("gru checkpoint missing hidden size".into()))?;
                Ok(NeuralParams::Gru(GruParams {
                    input_dim: features,
                    hidden,
                    dropout: hyper.dropout.unwrap_or(0.0),
                    w_update: take_matrix(&mut map, "w_update", hidden, features)?,
                    u_update: take_matrix(&mut map, "u_update", hidden, hidden)?,
                    b_update: take_vector(&mut map, "b_update", hidden)?,
                    w_reset: take_matrix(&mut map, "w_reset", hidden, features)?,
                    u_reset: take_matrix(&mut map, "u_reset", hidden, hidden)?,
                    b_reset: take_vector(&mut map, "b_reset", hidden)?,
                    w_cand: take_matrix(&mut map, "w_cand", hidden, features)?,
                    u_cand: take_matrix(&mut map, "u_cand", hidden, hidden)?,
                    b_cand: take_vector(&mut map, "b_cand", hidden)?,
                    head: take_dense(&mut map, "head", 1, hidden)?,
                }))
            }
            ModelKind::Fnn => {
                let width = hyper
                    .hidden
                    .ok_or_else(|| Error::Schema("fnn checkpoint missing layer width".into()))?;
                let input_dim = hyper.window * features;
                Ok(NeuralParams::Fnn(FnnParams {
                    input_dim,
                    hidden1: take_dense(&mut map, "hidden1", width, input_dim)?,
                    hidden2: take_dense(&mut map, "hidden2", width, width)?,
                    head: take_dense(&mut map, "head", 1, width)?,
                }))
            }
            ModelKind::Arima => Err(Error::Schema(
                "arima checkpoint holds a fitted model, not neural parameters".into(),
            )),
        }
    }

    pub fn to_arima(&self) -> Result<ArimaModel> {
        if self.model_kind != ModelKind::Arima {
            return Err(Error::Schema(format!(
                "checkpoint holds a {} model, not arima",
                self.model_kind
            )));
        }
        let order = self
            .hyperparameters
            .arima_order
            .ok_or_else(|| Error::Schema("arima checkpoint missing order".into()))?;
        let mut map = self.params.clone();
        let intercept = take_scalar(&mut map, "intercept")?;
        let ar = take_vector(&mut map, "ar", order.p)?;
        let ma = take_vector(&mut map, "ma", order.q)?;
        let residual_variance = take_scalar(&mut map, "residual_variance")?;
        let diagnostics = FitDiagnostics {
            ssr: take_scalar(&mut map, "ssr")?,
            aic: take_scalar(&mut map, "aic")?,
            n_eff: take_scalar(&mut map, "n_eff")? as usize,
            iterations: take_scalar(&mut map, "iterations")? as usize,
        };
        Ok(ArimaModel {
            order,
            intercept,
            ar,
            ma,
            residual_variance,
            diagnostics,
            objective_trace: Vec::new(),
        })
    }

    /// Refuse to evaluate against a bundle the checkpoint was not built from.
    pub fn check_compatibility(&self, scaler_digest: &str, registry: &[String]) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Compatibility(format!(
                "checkpoint format v{} (this build reads v{FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.scaler_digest != scaler_digest {
            return Err(Error::Compatibility(
                "checkpoint scaler digest does not match the bundle".into(),
            ));
        }
        if self.feature_registry != registry {
            return Err(Error::Compatibility(
                "checkpoint feature registry does not match the bundle".into(),
            ));
        }
        Ok(())
    }
}

pub fn save_checkpoint(checkpoint: &Checkpoint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, checkpoint)?;
    out.write_all(b"\n")
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    out.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_reader(file)?)
}
