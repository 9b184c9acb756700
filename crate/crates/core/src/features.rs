//! Feature engineering, temporal splitting, and min-max scaling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Datelike, Duration, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::TimeSeriesFrame;

/// Column registry of an engineered feature matrix, in order.
pub const FEATURE_REGISTRY: [&str; 10] = [
    "consumption",
    "temperature",
    "humidity",
    "wind_speed",
    "hour_of_day",
    "day_of_week",
    "month_of_year",
    "lag_1",
    "lag_24",
    "lag_168",
];

/// Longest lag; the first `MAX_LAG` rows of a frame cannot be featurized.
pub const MAX_LAG: usize = 168;

/// Row-major matrix of engineered features with its column registry and the
/// timestamp of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    pub timestamps: Vec<DateTime<Utc>>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(columns: Vec<String>, timestamps: Vec<DateTime<Utc>>, data: Vec<f64>) -> Result<Self> {
        if timestamps.len() * columns.len() != data.len() {
            return Err(Error::Shape(format!(
                "feature matrix: {} rows x {} columns needs {} values, got {}",
                timestamps.len(),
                columns.len(),
                timestamps.len() * columns.len(),
                data.len()
            )));
        }
        Ok(FeatureMatrix {
            columns,
            timestamps,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.timestamps.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols()..(r + 1) * self.n_cols()]
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Copy one column out of the row-major storage.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        let stride = self.n_cols();
        Ok(self.data[idx..]
            .iter()
            .step_by(stride)
            .copied()
            .collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Derive calendar and lag columns from a complete frame, dropping the first
/// 168 rows (which lack `lag_168`). Output length = input length − 168.
/// Day-of-week uses the Monday = 0 convention.
pub fn engineer_features(frame: &TimeSeriesFrame) -> Result<FeatureMatrix> {
    if !frame.is_complete() {
        return Err(Error::Domain(
            "engineer_features requires an imputed frame".into(),
        ));
    }
    if frame.len() <= MAX_LAG {
        return Err(Error::InsufficientData(format!(
            "need more than {MAX_LAG} rows to build lag features, got {}",
            frame.len()
        )));
    }
    let consumption = frame.dense_column("consumption")?;
    let temperature = frame.dense_column("temperature")?;
    let humidity = frame.dense_column("humidity")?;
    let wind_speed = frame.dense_column("wind_speed")?;

    let n_out = frame.len() - MAX_LAG;
    let mut data = Vec::with_capacity(n_out * FEATURE_REGISTRY.len());
    let mut timestamps = Vec::with_capacity(n_out);
    for t in MAX_LAG..frame.len() {
        let ts = frame.timestamps[t];
        timestamps.push(ts);
        data.extend_from_slice(&[
            consumption[t],
            temperature[t],
            humidity[t],
            wind_speed[t],
            ts.hour() as f64,
            ts.weekday().num_days_from_monday() as f64,
            ts.month() as f64,
            consumption[t - 1],
            consumption[t - 24],
            consumption[t - 168],
        ]);
    }
    FeatureMatrix::new(
        FEATURE_REGISTRY.iter().map(|s| s.to_string()).collect(),
        timestamps,
        data,
    )
}

/// A contiguous `[start, end)` row range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowRange {
    pub start: usize,
    pub end: usize,
}

impl RowRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn as_range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Contiguous, temporally ordered train/validation/test row ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: RowRange,
    pub validation: RowRange,
    pub test: RowRange,
}

/// Partition `n_rows` rows into contiguous blocks: train gets
/// `floor(f_train * n)`, validation `floor(f_val * n)`, test the remainder.
pub fn temporal_split(n_rows: usize, fractions: (f64, f64, f64)) -> Result<SplitIndices> {
    let (f_train, f_val, f_test) = fractions;
    if f_train <= 0.0 || f_val <= 0.0 || f_test <= 0.0 {
        return Err(Error::Config(format!(
            "split fractions must be positive, got {fractions:?}"
        )));
    }
    if ((f_train + f_val + f_test) - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions must sum to 1, got {fractions:?}"
        )));
    }
    let n_train = (f_train * n_rows as f64).floor() as usize;
    let n_val = (f_val * n_rows as f64).floor() as usize;
    let splits = SplitIndices {
        train: RowRange {
            start: 0,
            end: n_train,
        },
        validation: RowRange {
            start: n_train,
            end: n_train + n_val,
        },
        test: RowRange {
            start: n_train + n_val,
            end: n_rows,
        },
    };
    if splits.train.is_empty() || splits.validation.is_empty() || splits.test.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{n_rows} rows leave an empty split under fractions {fractions:?}"
        )));
    }
    Ok(splits)
}

/// Per-column minimum and maximum observed on the training rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    columns: Vec<String>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl ScalerParams {
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn bounds(&self, column: &str) -> Result<(f64, f64)> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == column)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))?;
        Ok((self.mins[idx], self.maxs[idx]))
    }

    /// A column whose training minimum equals its maximum.
    pub fn is_degenerate(&self, column: &str) -> Result<bool> {
        let (min, max) = self.bounds(column)?;
        Ok(min == max)
    }

    pub fn scale_value(&self, x: f64, column: &str) -> Result<f64> {
        let (min, max) = self.bounds(column)?;
        if max == min {
            return Ok(0.0);
        }
        Ok((x - min) / (max - min))
    }

    pub fn invert_value(&self, scaled: f64, column: &str) -> Result<f64> {
        let (min, max) = self.bounds(column)?;
        Ok(scaled * (max - min) + min)
    }

    /// Digest of the scaler and its registry; embedded in checkpoints so a
    /// stale checkpoint fails loudly against a different bundle.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canon = String::new();
        for (i, c) in self.columns.iter().enumerate() {
            canon.push_str(&format!("{c}={}:{};", self.mins[i], self.maxs[i]));
        }
        let hash = Sha256::digest(canon.as_bytes());
        let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }
}

/// Fit per-column min/max over the training rows only.
pub fn fit_minmax(matrix: &FeatureMatrix, train_rows: RowRange) -> Result<ScalerParams> {
    if train_rows.is_empty() || train_rows.end > matrix.n_rows() {
        return Err(Error::InsufficientData(format!(
            "scaler fit range {train_rows:?} invalid for {} rows",
            matrix.n_rows()
        )));
    }
    let ncols = matrix.n_cols();
    let mut mins = vec![f64::INFINITY; ncols];
    let mut maxs = vec![f64::NEG_INFINITY; ncols];
    for r in train_rows.as_range() {
        for (c, v) in matrix.row(r).iter().enumerate() {
            mins[c] = mins[c].min(*v);
            maxs[c] = maxs[c].max(*v);
        }
    }
    Ok(ScalerParams {
        columns: matrix.columns().to_vec(),
        mins,
        maxs,
    })
}

/// Scale every column to `(x - min) / (max - min)`. Degenerate columns map
/// to 0.0; values outside the training range fall outside [0, 1] unclipped.
pub fn apply_scale(matrix: &FeatureMatrix, params: &ScalerParams) -> Result<FeatureMatrix> {
    if matrix.columns() != params.columns() {
        return Err(Error::Schema(
            "scaler registry does not match matrix columns".into(),
        ));
    }
    let ncols = matrix.n_cols();
    let spans: Vec<(f64, f64)> = (0..ncols)
        .map(|c| (params.mins[c], params.maxs[c] - params.mins[c]))
        .collect();
    let data = matrix
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (min, span) = spans[i % ncols];
            if span == 0.0 {
                0.0
            } else {
                (v - min) / span
            }
        })
        .collect();
    FeatureMatrix::new(
        matrix.columns().to_vec(),
        matrix.timestamps.clone(),
        data,
    )
}

/// Map scaled values of one column back to the original units; exact inverse
/// of [`apply_scale`] for non-degenerate columns.
pub fn invert_scale(values: &[f64], params: &ScalerParams, column: &str) -> Result<Vec<f64>> {
    let (min, max) = params.bounds(column)?;
    let span = max - min;
    Ok(values.iter().map(|&v| v * span + min).collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct MinMaxDoc {
    min: f64,
    max: f64,
}

/// Persist scaler parameters as a JSON object mapping column -> {min, max}.
pub fn write_scaler_json(params: &ScalerParams, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let map: BTreeMap<&str, MinMaxDoc> = params
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (
                c.as_str(),
                MinMaxDoc {
                    min: params.mins[i],
                    max: params.maxs[i],
                },
            )
        })
        .collect();
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &map)?;
    out.write_all(b"\n")
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Load scaler parameters, reordering them to match `registry`.
pub fn read_scaler_json(path: impl AsRef<Path>, registry: &[String]) -> Result<ScalerParams> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let map: BTreeMap<String, MinMaxDoc> = serde_json::from_reader(file)?;
    let mut mins = Vec::with_capacity(registry.len());
    let mut maxs = Vec::with_capacity(registry.len());
    for col in registry {
        let entry = map
            .get(col)
            .ok_or_else(|| Error::Schema(format!("scaler file missing column '{col}'")))?;
        if entry.max < entry.min {
            return Err(Error::Schema(format!(
                "scaler column '{col}' has max < min"
            )));
        }
        mins.push(entry.min);
        maxs.push(entry.max);
    }
    if map.len() != registry.len() {
        return Err(Error::Schema(format!(
            "scaler file has {} columns, registry has {}",
            map.len(),
            registry.len()
        )));
    }
    Ok(ScalerParams {
        columns: registry.to_vec(),
        mins,
        maxs,
    })
}

/// Persist a feature matrix as CSV with the column registry as header.
/// Timestamps are not stored; rows sit on the hourly grid anchored at the
/// matrix origin, which the split manifest records.
pub fn write_feature_csv(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", matrix.columns().join(","))
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut line = String::new();
    for r in 0..matrix.n_rows() {
        line.clear();
        for (c, v) in matrix.row(r).iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}").map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    out.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Load a feature matrix persisted by [`write_feature_csv`]; `origin` is the
/// timestamp of row 0.
pub fn read_feature_csv(path: impl AsRef<Path>, origin: DateTime<Utc>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Schema(format!("cannot read feature header: {e}")))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut data = Vec::new();
    let mut n_rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad feature value '{field}'"),
            })?;
            data.push(v);
        }
        n_rows += 1;
    }
    let timestamps = (0..n_rows)
        .map(|i| origin + Duration::hours(i as i64))
        .collect();
    FeatureMatrix::new(columns, timestamps, data)
}
