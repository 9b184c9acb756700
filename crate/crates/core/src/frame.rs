//! Hourly time-series ingestion: CSV parsing, grid completion, linear
//! imputation of gaps, and per-column summary statistics.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, GapKind, Result};

/// Exact header of the raw data CSV.
pub const CSV_HEADER: [&str; 5] = [
    "timestamp",
    "consumption_kwh",
    "temperature_c",
    "humidity_pct",
    "wind_speed_ms",
];

/// Timestamp format used throughout: ISO-8601 UTC with a `Z` suffix.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

/// Hourly records of consumption plus weather covariates. Columns may hold
/// `None` (missing marker) until [`impute_linear`] has run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesFrame {
    pub timestamps: Vec<DateTime<Utc>>,
    pub consumption: Vec<Option<f64>>,
    pub temperature: Vec<Option<f64>>,
    pub humidity: Vec<Option<f64>>,
    pub wind_speed: Vec<Option<f64>>,
}

/// Names of the four value columns, in schema order.
pub const VALUE_COLUMNS: [&str; 4] = ["consumption", "temperature", "humidity", "wind_speed"];

impl TimeSeriesFrame {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn value_columns(&self) -> [(&'static str, &Vec<Option<f64>>); 4] {
        [
            ("consumption", &self.consumption),
            ("temperature", &self.temperature),
            ("humidity", &self.humidity),
            ("wind_speed", &self.wind_speed),
        ]
    }

    /// True when no column contains a missing marker.
    pub fn is_complete(&self) -> bool {
        self.value_columns()
            .iter()
            .all(|(_, col)| col.iter().all(Option::is_some))
    }

    /// Unwrap a fully-imputed column; errors if a marker is still present.
    pub fn dense_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self
            .value_columns()
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, c)| *c)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?
            .clone();
        col.into_iter()
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Domain(format!("column '{name}' still has missing values")))
    }
}

fn parse_timestamp(s: &str, line: u64) -> Result<DateTime<Utc>> {
    let naive = chrono::NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT).map_err(|e| {
        Error::Parse {
            line,
            message: format!("bad timestamp '{s}': {e}"),
        }
    })?;
    Ok(Utc.from_utc_datetime(&naive))
}

fn parse_value(s: &str, name: &str, line: u64) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    let v: f64 = s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad {name} value '{s}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite {name} value '{s}'"),
        });
    }
    Ok(Some(v))
}

/// Load a raw hourly CSV.
///
/// Rows are sorted ascending by timestamp; duplicates are rejected; hours
/// absent from the grid between the first and last row are inserted with all
/// value columns marked missing. Every timestamp must sit a whole number of
/// hours after the earliest one.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeriesFrame> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("cannot read header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Schema(format!(
            "header must be exactly '{}', got '{}'",
            CSV_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut rows: Vec<(DateTime<Utc>, [Option<f64>; 4])> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line())
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let ts = parse_timestamp(&record[0], line)?;
        let values = [
            parse_value(&record[1], "consumption_kwh", line)?,
            parse_value(&record[2], "temperature_c", line)?,
            parse_value(&record[3], "humidity_pct", line)?,
            parse_value(&record[4], "wind_speed_ms", line)?,
        ];
        rows.push((ts, values));
    }

    rows.sort_by_key(|(ts, _)| *ts);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Schema(format!(
                "duplicate timestamp {}",
                pair[0].0.format(TIMESTAMP_FORMAT)
            )));
        }
    }

    let mut frame = TimeSeriesFrame {
        timestamps: Vec::new(),
        consumption: Vec::new(),
        temperature: Vec::new(),
        humidity: Vec::new(),
        wind_speed: Vec::new(),
    };
    let Some(&(first, _)) = rows.first() else {
        return Ok(frame);
    };

    for (ts, values) in &rows {
        let offset = *ts - first;
        if offset.num_seconds() % 3600 != 0 {
            return Err(Error::Schema(format!(
                "timestamp {} is not on the hourly grid anchored at {}",
                ts.format(TIMESTAMP_FORMAT),
                first.format(TIMESTAMP_FORMAT)
            )));
        }
        // Fill any skipped grid hours with missing markers.
        while let Some(&last) = frame.timestamps.last() {
            let next = last + Duration::hours(1);
            if next >= *ts {
                break;
            }
            frame.push_row(next, [None, None, None, None]);
        }
        if frame.timestamps.is_empty() && *ts != first {
            unreachable!("rows are sorted, first row anchors the grid");
        }
        frame.push_row(*ts, *values);
    }
    Ok(frame)
}

impl TimeSeriesFrame {
    fn push_row(&mut self, ts: DateTime<Utc>, values: [Option<f64>; 4]) {
        self.timestamps.push(ts);
        self.consumption.push(values[0]);
        self.temperature.push(values[1]);
        self.humidity.push(values[2]);
        self.wind_speed.push(values[3]);
    }
}

/// Write a frame back out in the ingestion schema (missing markers become
/// empty fields).
pub fn write_csv(frame: &TimeSeriesFrame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = BufWriter::new(file);
    let fmt_cell = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    writeln!(out, "{}", CSV_HEADER.join(","))
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    for i in 0..frame.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            frame.timestamps[i].format(TIMESTAMP_FORMAT),
            fmt_cell(&frame.consumption[i]),
            fmt_cell(&frame.temperature[i]),
            fmt_cell(&frame.humidity[i]),
            fmt_cell(&frame.wind_speed[i]),
        )
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    out.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn impute_column(name: &str, col: &[Option<f64>]) -> Result<Vec<f64>> {
    if col.is_empty() {
        return Ok(Vec::new());
    }
    if col[0].is_none() {
        return Err(Error::Imputation {
            column: name.to_string(),
            kind: GapKind::Leading,
        });
    }
    if col[col.len() - 1].is_none() {
        return Err(Error::Imputation {
            column: name.to_string(),
            kind: GapKind::Trailing,
        });
    }
    let mut out = Vec::with_capacity(col.len());
    let mut i = 0;
    while i < col.len() {
        match col[i] {
            Some(v) => {
                out.push(v);
                i += 1;
            }
            None => {
                // Rows are on a constant hourly grid, so index distance is
                // time distance; interpolate between the bracketing values.
                let left = out[i - 1];
                let mut j = i;
                while col[j].is_none() {
                    j += 1;
                }
                let right = col[j].unwrap();
                let span = (j - (i - 1)) as f64;
                for k in i..j {
                    let w = (k - (i - 1)) as f64 / span;
                    out.push(left + (right - left) * w);
                }
                i = j;
            }
        }
    }
    Ok(out)
}

/// Replace every missing marker with the linear interpolant between its
/// nearest observed neighbors. Leading or trailing gaps are an error.
pub fn impute_linear(frame: &TimeSeriesFrame) -> Result<TimeSeriesFrame> {
    let wrap = |v: Vec<f64>| v.into_iter().map(Some).collect();
    Ok(TimeSeriesFrame {
        timestamps: frame.timestamps.clone(),
        consumption: wrap(impute_column("consumption", &frame.consumption)?),
        temperature: wrap(impute_column("temperature", &frame.temperature)?),
        humidity: wrap(impute_column("humidity", &frame.humidity)?),
        wind_speed: wrap(impute_column("wind_speed", &frame.wind_speed)?),
    })
}

/// Per-column sample statistics (population 1/n standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub consumption: ColumnStats,
    pub temperature: ColumnStats,
    pub humidity: ColumnStats,
    pub wind_speed: ColumnStats,
}

pub fn column_stats(values: &[f64]) -> ColumnStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    ColumnStats {
        mean,
        std: var.sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Summary statistics for a complete (imputed) frame.
pub fn summarize(frame: &TimeSeriesFrame) -> Result<SummaryStats> {
    if frame.is_empty() {
        return Err(Error::InsufficientData("summarize on an empty frame".into()));
    }
    Ok(SummaryStats {
        n: frame.len(),
        consumption: column_stats(&frame.dense_column("consumption")?),
        temperature: column_stats(&frame.dense_column("temperature")?),
        humidity: column_stats(&frame.dense_column("humidity")?),
        wind_speed: column_stats(&frame.dense_column("wind_speed")?),
    })
}
