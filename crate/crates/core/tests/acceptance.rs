//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod util;

use std::time::Instant;

use chrono::{Duration, TimeZone, Utc};
use chronocast_core::arima::{fit_css, forecast_one_step, ArimaModel, ArimaOrder, FitDiagnostics};
use chronocast_core::benchmark::{run_benchmark, BenchmarkConfig};
use chronocast_core::features::{apply_scale, engineer_features, fit_minmax, temporal_split};
use chronocast_core::frame::summarize;
use chronocast_core::metrics::{mae, mape, pearson_r, r_squared, rmse};
use chronocast_core::models::{init_params, ModelKind, SequenceModel};
use chronocast_core::pipeline::prepare;
use chronocast_core::residual::{quantile_linear, residual_analysis};
use chronocast_core::synth::{generate, SynthConfig};
use chronocast_core::train::{train, EarlyStopping, StopReason, TrainConfig};
use chronocast_core::windows::{make_windows, WindowSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(number: u32, name: &str, check: impl FnOnce() -> Result<String, String>) {
    match check() {
        Ok(detail) => println!("ACCEPTANCE {number:02} {name}: PASS ({detail})"),
        Err(msg) => {
            println!("ACCEPTANCE {number:02} {name}: FAIL - {msg}");
            panic!("acceptance criterion {number} ({name}) failed: {msg}");
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness
// ---------------------------------------------------------------------------

#[test]
fn acceptance_01_gradient_correctness() {
    criterion(1, "gradient correctness", || {
        let start = Instant::now();
        let mut worst_overall = 0.0f64;
        for kind in [ModelKind::Lstm, ModelKind::Gru, ModelKind::Fnn] {
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let mut done = 0;
            while done < 20 {
                let hidden = rng.random_range(2..=4);
                let seed: u64 = rng.random();
                let params = init_params(kind, 2, 5, hidden, 0.0, None, seed)
                    .map_err(|e| e.to_string())?;
                let data: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
                if !util::fnn_kink_safe(&params, &data, 20.0 * 1e-3) {
                    continue;
                }
                done += 1;
                let window =
                    chronocast_core::windows::SeqWindow::new(&data, 5, 2).map_err(|e| e.to_string())?;
                let mut r = ChaCha8Rng::seed_from_u64(0);
                let y0 = params
                    .predict(window, chronocast_core::models::Mode::Eval, &mut r)
                    .map_err(|e| e.to_string())?;
                let target = y0 + rng.random_range(-0.25..0.25);
                let err = util::max_grad_error(&params, &data, 5, target);
                worst_overall = worst_overall.max(err);
                if err >= 1e-6 {
                    return Err(format!(
                        "{kind} config {done}: max relative error {err:.3e} >= 1e-6"
                    ));
                }
            }
        }
        let elapsed = start.elapsed();
        if elapsed.as_secs() >= 60 {
            return Err(format!("took {elapsed:?}, budget is one minute"));
        }
        Ok(format!(
            "60 configs, worst error {worst_overall:.2e}, {:.1}s",
            elapsed.as_secs_f64()
        ))
    });
}

// ---------------------------------------------------------------------------
// 2. Metric oracle equivalence
// ---------------------------------------------------------------------------

mod metric_oracles {
    //! Straightforward loop translations of the metric definitions,
    //! independent of the library implementations.

    pub fn mae(y: &[f64], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            s += (y[i] - p[i]).abs();
        }
        s / y.len() as f64
    }

    pub fn rmse(y: &[f64], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            s += (y[i] - p[i]) * (y[i] - p[i]);
        }
        (s / y.len() as f64).sqrt()
    }

    pub fn mape(y: &[f64], p: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            s += ((y[i] - p[i]) / y[i]).abs();
        }
        100.0 * s / y.len() as f64
    }

    pub fn pearson_r(y: &[f64], p: &[f64]) -> f64 {
        let n = y.len() as f64;
        let mut my = 0.0;
        let mut mp = 0.0;
        for i in 0..y.len() {
            my += y[i];
            mp += p[i];
        }
        my /= n;
        mp /= n;
        let mut num = 0.0;
        let mut dy = 0.0;
        let mut dp = 0.0;
        for i in 0..y.len() {
            num += (y[i] - my) * (p[i] - mp);
            dy += (y[i] - my) * (y[i] - my);
            dp += (p[i] - mp) * (p[i] - mp);
        }
        num / (dy * dp).sqrt()
    }

    pub fn r_squared(y: &[f64], p: &[f64]) -> f64 {
        let n = y.len() as f64;
        let mut my = 0.0;
        for v in y {
            my += v;
        }
        my /= n;
        let mut ssr = 0.0;
        let mut sst = 0.0;
        for i in 0..y.len() {
            ssr += (y[i] - p[i]) * (y[i] - p[i]);
            sst += (y[i] - my) * (y[i] - my);
        }
        1.0 - ssr / sst
    }
}

#[test]
fn acceptance_02_metric_oracle_equivalence() {
    criterion(2, "metric oracle equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut worst = 0.0f64;
        for pair in 0..1000 {
            let n = rng.random_range(2..=200);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..100.0)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..100.0)).collect();

            let checks = [
                (mae(&y, &p).unwrap(), metric_oracles::mae(&y, &p), "mae"),
                (rmse(&y, &p).unwrap(), metric_oracles::rmse(&y, &p), "rmse"),
                (mape(&y, &p).unwrap(), metric_oracles::mape(&y, &p), "mape"),
                (
                    pearson_r(&y, &p).unwrap(),
                    metric_oracles::pearson_r(&y, &p),
                    "pearson_r",
                ),
                (
                    r_squared(&y, &p).unwrap(),
                    metric_oracles::r_squared(&y, &p),
                    "r_squared",
                ),
            ];
            for (ours, oracle, name) in checks {
                let diff = (ours - oracle).abs();
                worst = worst.max(diff);
                if diff >= 1e-12 {
                    return Err(format!("pair {pair}: {name} differs by {diff:.3e}"));
                }
            }
            // Power-mean inequality.
            if rmse(&y, &p).unwrap() < mae(&y, &p).unwrap() {
                return Err(format!("pair {pair}: rmse < mae"));
            }
            // Affine invariance of r under positive transforms of either side.
            let y2: Vec<f64> = y.iter().map(|v| 3.5 * v + 11.0).collect();
            let p2: Vec<f64> = p.iter().map(|v| 0.25 * v - 2.0).collect();
            let r0 = pearson_r(&y, &p).unwrap();
            let r1 = pearson_r(&y2, &p).unwrap();
            let r2 = pearson_r(&y, &p2).unwrap();
            if (r0 - r1).abs() > 1e-10 || (r0 - r2).abs() > 1e-10 {
                return Err(format!("pair {pair}: r not affine-invariant"));
            }
        }
        Ok(format!("1000 pairs, worst deviation {worst:.2e}"))
    });
}

// ---------------------------------------------------------------------------
// 3. Pipeline properties
// ---------------------------------------------------------------------------

#[test]
fn acceptance_03_pipeline_properties() {
    criterion(3, "pipeline properties", || {
        let frame = generate(&SynthConfig {
            n_hours: 2000,
            ..SynthConfig::default()
        })
        .map_err(|e| e.to_string())?;
        let imputed = chronocast_core::frame::impute_linear(&frame).map_err(|e| e.to_string())?;
        let matrix = engineer_features(&imputed).map_err(|e| e.to_string())?;
        let n = matrix.n_rows();
        if n != 2000 - 168 {
            return Err(format!("feature rows {n}, expected {}", 2000 - 168));
        }
        let splits = temporal_split(n, (0.70, 0.15, 0.15)).map_err(|e| e.to_string())?;
        let expected_train = (0.70 * n as f64).floor() as usize;
        let expected_val = (0.15 * n as f64).floor() as usize;
        if splits.train.len() != expected_train
            || splits.validation.len() != expected_val
            || splits.test.len() != n - expected_train - expected_val
        {
            return Err("split sizes break the floor rule".into());
        }
        let ts = &matrix.timestamps;
        if !(ts[splits.train.end - 1] < ts[splits.validation.start]
            && ts[splits.validation.end - 1] < ts[splits.test.start])
        {
            return Err("split ordering violated".into());
        }

        // Scaler round trip within 1e-12 on every non-degenerate column.
        let scaler = fit_minmax(&matrix, splits.train).map_err(|e| e.to_string())?;
        let scaled = apply_scale(&matrix, &scaler).map_err(|e| e.to_string())?;
        for col in matrix.columns() {
            if scaler.is_degenerate(col).map_err(|e| e.to_string())? {
                continue;
            }
            let orig = matrix.column(col).map_err(|e| e.to_string())?;
            let back = chronocast_core::features::invert_scale(
                &scaled.column(col).map_err(|e| e.to_string())?,
                &scaler,
                col,
            )
            .map_err(|e| e.to_string())?;
            for (a, b) in orig.iter().zip(&back) {
                if (a - b).abs() >= 1e-12 {
                    return Err(format!("round trip off by {:.3e} in {col}", (a - b).abs()));
                }
            }
        }

        // Window count per split.
        let set = make_windows(&scaled, splits.validation, 24, 1).map_err(|e| e.to_string())?;
        if set.len() != splits.validation.len() - 24 {
            return Err("window count != split length - 24".into());
        }

        // Scaler parameters are a function of the training rows alone.
        let truncated = chronocast_core::features::FeatureMatrix::new(
            matrix.columns().to_vec(),
            matrix.timestamps[..splits.train.len()].to_vec(),
            matrix.as_slice()[..splits.train.len() * matrix.n_cols()].to_vec(),
        )
        .map_err(|e| e.to_string())?;
        let refit = fit_minmax(&truncated, splits.train).map_err(|e| e.to_string())?;
        for col in matrix.columns() {
            if scaler.bounds(col).unwrap() != refit.bounds(col).unwrap() {
                return Err(format!("scaler for {col} depends on non-training rows"));
            }
        }
        Ok(format!(
            "splits {}/{}/{}, round trip < 1e-12, no leakage",
            splits.train.len(),
            splits.validation.len(),
            splits.test.len()
        ))
    });
}

// ---------------------------------------------------------------------------
// 4. Synthetic calibration
// ---------------------------------------------------------------------------

#[test]
fn acceptance_04_synthetic_calibration() {
    criterion(4, "synthetic calibration", || {
        let frame = generate(&SynthConfig::default()).map_err(|e| e.to_string())?;
        let stats = summarize(&frame).map_err(|e| e.to_string())?;
        let c = &stats.consumption;
        if (c.mean - 312.5).abs() >= 15.0 {
            return Err(format!("consumption mean {:.2} outside 312.5 +- 15", c.mean));
        }
        if (c.std - 78.6).abs() >= 15.0 {
            return Err(format!("consumption std {:.2} outside 78.6 +- 15", c.std));
        }
        let ranges = [
            ("consumption", c, (150.0, 520.0)),
            ("temperature", &stats.temperature, (5.0, 38.0)),
            ("humidity", &stats.humidity, (30.0, 90.0)),
            ("wind_speed", &stats.wind_speed, (0.0, 12.0)),
        ];
        for (name, s, (lo, hi)) in ranges {
            if s.min < lo || s.max > hi {
                return Err(format!(
                    "{name} range [{:.2}, {:.2}] escapes [{lo}, {hi}]",
                    s.min, s.max
                ));
            }
        }
        Ok(format!(
            "mean {:.1}, std {:.1}, all ranges contained",
            c.mean, c.std
        ))
    });
}

// ---------------------------------------------------------------------------
// 5. Comparative ordering on the default dataset
// ---------------------------------------------------------------------------

#[test]
fn acceptance_05_comparative_ordering() {
    criterion(5, "comparative ordering", || {
        let start = Instant::now();
        let frame = generate(&SynthConfig::default()).map_err(|e| e.to_string())?;
        let prepared = prepare(&frame).map_err(|e| e.to_string())?;
        let cfg = BenchmarkConfig::default(); // seed 42, epochs capped at 30
        let run = run_benchmark(&prepared, &cfg);
        let elapsed = start.elapsed();
        if !run.report.all_completed() {
            return Err(format!("model failures: {:#?}", run.report.models));
        }
        let rmse_of = |kind: ModelKind| {
            run.report
                .outcome(kind)
                .and_then(|m| m.evaluation.as_ref())
                .map(|e| e.metrics.normalized.rmse)
                .ok_or_else(|| format!("no evaluation for {kind}"))
        };
        let lstm = rmse_of(ModelKind::Lstm)?;
        let gru = rmse_of(ModelKind::Gru)?;
        let fnn = rmse_of(ModelKind::Fnn)?;
        let arima = rmse_of(ModelKind::Arima)?;
        if !(lstm < fnn && lstm < arima) {
            return Err(format!(
                "LSTM rmse {lstm:.4} must beat FNN {fnn:.4} and ARIMA {arima:.4}"
            ));
        }
        if !(gru < fnn && gru < arima) {
            return Err(format!(
                "GRU rmse {gru:.4} must beat FNN {fnn:.4} and ARIMA {arima:.4}"
            ));
        }
        let lstm_eval = run
            .report
            .outcome(ModelKind::Lstm)
            .and_then(|m| m.evaluation.as_ref())
            .expect("checked above");
        let mape_kwh = lstm_eval
            .metrics
            .original_kwh
            .mape_percent
            .ok_or("LSTM kWh mape missing")?;
        if mape_kwh >= 8.0 {
            return Err(format!("LSTM kWh mape {mape_kwh:.2}% >= 8%"));
        }
        let r2 = lstm_eval.metrics.original_kwh.r_squared;
        let r = lstm_eval.metrics.original_kwh.pearson_r;
        if r2 <= 0.90 {
            return Err(format!("LSTM R^2 {r2:.4} <= 0.90"));
        }
        if r <= 0.95 {
            return Err(format!("LSTM r {r:.4} <= 0.95"));
        }
        if elapsed.as_secs() >= 900 {
            return Err(format!(
                "benchmark took {:.0}s, budget is 15 minutes",
                elapsed.as_secs_f64()
            ));
        }
        Ok(format!(
            "rmse lstm {lstm:.4} / gru {gru:.4} < fnn {fnn:.4} < arima {arima:.4}; \
             mape {mape_kwh:.2}%, R^2 {r2:.3}, r {r:.3}; {:.0}s",
            elapsed.as_secs_f64()
        ))
    });
}

// ---------------------------------------------------------------------------
// 6. Learnability smoke test
// ---------------------------------------------------------------------------

fn sine_windows(hours: usize, offset: usize) -> WindowSet {
    let series: Vec<f64> = (0..hours + offset)
        .skip(offset)
        .map(|t| 0.5 + 0.5 * (std::f64::consts::TAU * t as f64 / 24.0).sin())
        .collect();
    let window = 24;
    let n = hours - window;
    let mut inputs = Vec::with_capacity(n * window);
    let mut targets = Vec::with_capacity(n);
    let start = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
    let mut stamps = Vec::with_capacity(n);
    for i in 0..n {
        inputs.extend_from_slice(&series[i..i + window]);
        targets.push(series[i + window]);
        stamps.push(start + Duration::hours((offset + i + window) as i64));
    }
    WindowSet::from_parts(inputs, targets, stamps, window, 1).unwrap()
}

#[test]
fn acceptance_06_learnability_smoke() {
    criterion(6, "learnability smoke test", || {
        let train_set = sine_windows(480, 0);
        let val_set = sine_windows(120, 480);
        let config = TrainConfig {
            model: ModelKind::Lstm,
            hidden: 16,
            dropout: 0.0,
            extra_dense: None,
            batch_size: 32,
            max_epochs: 100,
            patience: 100,
            learning_rate: 1e-2,
            seed: 42,
        };
        let params =
            init_params(ModelKind::Lstm, 1, 24, 16, 0.0, None, 42).map_err(|e| e.to_string())?;
        let (_, history) = train(&config, params, &train_set, &val_set).map_err(|e| e.to_string())?;
        let best = history.best_val_loss();
        if best >= 1e-3 {
            return Err(format!(
                "validation mse {best:.2e} after {} epochs",
                history.epochs_run()
            ));
        }
        Ok(format!(
            "val mse {best:.2e} at epoch {} of {}",
            history.best_epoch,
            history.epochs_run()
        ))
    });
}

// ---------------------------------------------------------------------------
// 7. Determinism
// ---------------------------------------------------------------------------

#[test]
fn acceptance_07_determinism() {
    criterion(7, "determinism", || {
        let one_run = || -> Result<(Vec<u8>, Vec<u8>), String> {
            let frame = generate(&SynthConfig {
                n_hours: 1200,
                ..SynthConfig::default()
            })
            .map_err(|e| e.to_string())?;
            let prepared = prepare(&frame).map_err(|e| e.to_string())?;
            let cfg = BenchmarkConfig {
                max_epochs: 3,
                lstm_hidden: 8,
                gru_hidden: 8,
                ..BenchmarkConfig::default()
            };
            let run = run_benchmark(&prepared, &cfg);
            if !run.report.all_completed() {
                return Err("benchmark failed".into());
            }
            let report_bytes = serde_json::to_vec(&run.report).map_err(|e| e.to_string())?;
            let lstm = run.lstm.as_ref().expect("completed");
            let ckpt = chronocast_core::checkpoint::Checkpoint::from_neural(
                &lstm.params,
                prepared.train.window(),
                prepared.scaler.digest(),
                prepared.matrix.columns().to_vec(),
                cfg.seed,
            );
            let ckpt_bytes = serde_json::to_vec(&ckpt).map_err(|e| e.to_string())?;
            Ok((report_bytes, ckpt_bytes))
        };
        let (report_a, ckpt_a) = one_run()?;
        let (report_b, ckpt_b) = one_run()?;
        if report_a != report_b {
            return Err("report bytes differ between identical runs".into());
        }
        if ckpt_a != ckpt_b {
            return Err("checkpoint bytes differ between identical runs".into());
        }
        Ok(format!(
            "report ({} bytes) and checkpoint ({} bytes) identical across runs",
            report_a.len(),
            ckpt_a.len()
        ))
    });
}

// ---------------------------------------------------------------------------
// 8. Early stopping
// ---------------------------------------------------------------------------

#[test]
fn acceptance_08_early_stopping() {
    criterion(8, "early stopping", || {
        // Fixture: improvements at epochs 1-3, then a plateau. With patience
        // 2 the stop must land exactly at epoch 5 and keep epoch 3.
        let losses = [1.0, 0.8, 0.5, 0.55, 0.52, 0.9];
        let mut stopper = EarlyStopping::new(2);
        let mut stop_epoch = None;
        for (i, &l) in losses.iter().enumerate() {
            stopper.observe(i + 1, l);
            if stopper.should_stop() {
                stop_epoch = Some(i + 1);
                break;
            }
        }
        if stop_epoch != Some(5) || stopper.best_epoch() != 3 {
            return Err(format!(
                "plateau fixture: stopped {stop_epoch:?} (want Some(5)), best {} (want 3)",
                stopper.best_epoch()
            ));
        }

        // Strictly increasing losses with patience 1: stop at epoch 2,
        // keep epoch 1.
        let mut stopper = EarlyStopping::new(1);
        let mut stop_epoch = None;
        for (i, &l) in [0.4, 0.6, 0.9].iter().enumerate() {
            stopper.observe(i + 1, l);
            if stopper.should_stop() {
                stop_epoch = Some(i + 1);
                break;
            }
        }
        if stop_epoch != Some(2) || stopper.best_epoch() != 1 {
            return Err("increasing fixture misbehaved".into());
        }

        // End-to-end: a real training run returns the best epoch's params.
        let train_set = sine_windows(200, 0);
        let val_set = sine_windows(100, 200);
        let config = TrainConfig {
            model: ModelKind::Fnn,
            hidden: 8,
            dropout: 0.0,
            extra_dense: None,
            batch_size: 32,
            max_epochs: 12,
            patience: 3,
            learning_rate: 3e-3,
            seed: 5,
        };
        let params = init_params(ModelKind::Fnn, 1, 24, 8, 0.0, None, 5).map_err(|e| e.to_string())?;
        let (best, history) =
            train(&config, params, &train_set, &val_set).map_err(|e| e.to_string())?;
        let min_val = history
            .val_loss
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if (history.best_val_loss() - min_val).abs() > 0.0 {
            return Err("best epoch is not the minimum validation loss".into());
        }
        let replay = chronocast_core::train::validation_mse(&best, &val_set)
            .map_err(|e| e.to_string())?;
        if (replay - min_val).abs() > 1e-12 {
            return Err(format!(
                "returned params score {replay:.3e}, best epoch was {min_val:.3e}"
            ));
        }
        let reason_ok = matches!(
            history.stop_reason,
            StopReason::EarlyStopping | StopReason::MaxEpochs
        );
        if !reason_ok {
            return Err("missing stop reason".into());
        }
        Ok("fixtures and live run agree with the patience rule".into())
    });
}

// ---------------------------------------------------------------------------
// 9. ARIMA recovery
// ---------------------------------------------------------------------------

#[test]
fn acceptance_09_arima_recovery() {
    criterion(9, "arima recovery", || {
        // AR(1) with phi = 0.5, n = 5000.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut series = Vec::with_capacity(5000);
        let mut prev = 0.0;
        for _ in 0..5000 {
            let v = 0.5 * prev + rand_distr::Distribution::sample(&normal, &mut rng);
            series.push(v);
            prev = v;
        }
        let model =
            fit_css(&series, ArimaOrder::new(1, 0, 0).unwrap()).map_err(|e| e.to_string())?;
        let phi = model.ar[0];
        if (phi - 0.5).abs() >= 0.05 {
            return Err(format!("phi estimate {phi:.4} outside 0.5 +- 0.05"));
        }

        // Random walk: d=1, no coefficients, zero intercept.
        let rw = ArimaModel {
            order: ArimaOrder::new(0, 1, 0).unwrap(),
            intercept: 0.0,
            ar: vec![],
            ma: vec![],
            residual_variance: 1.0,
            diagnostics: FitDiagnostics {
                ssr: 0.0,
                aic: 0.0,
                n_eff: 0,
                iterations: 0,
            },
            objective_trace: vec![],
        };
        let history = [4.0, 9.0, 1.0, 7.25];
        let f = forecast_one_step(&rw, &history).map_err(|e| e.to_string())?;
        if f != 7.25 {
            return Err(format!("random-walk forecast {f}, want the last observation"));
        }
        Ok(format!("phi {phi:.4}, random walk repeats the last value"))
    });
}

// ---------------------------------------------------------------------------
// 10. Residual analysis
// ---------------------------------------------------------------------------

#[test]
fn acceptance_10_residual_analysis() {
    criterion(10, "residual analysis", || {
        // Hand-checked quartiles on the 3-point fixture.
        let sorted = [-1.0, 0.0, 1.0];
        let quartiles = (
            quantile_linear(&sorted, 0.25),
            quantile_linear(&sorted, 0.50),
            quantile_linear(&sorted, 0.75),
        );
        if quartiles != (-1.0, 0.0, 1.0) {
            return Err(format!("3-point quartiles {quartiles:?}, want (-1, 0, 1)"));
        }

        // Histogram counts and hourly partition on a realistic series.
        let n = 777;
        let start = Utc.with_ymd_and_hms(2018, 5, 1, 0, 0, 0).unwrap();
        let stamps: Vec<_> = (0..n).map(|i| start + Duration::hours(i as i64)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(100.0..500.0)).collect();
        let p: Vec<f64> = y.iter().map(|v| v + rng.random_range(-40.0..40.0)).collect();
        let stats = residual_analysis(&y, &p, &stamps).map_err(|e| e.to_string())?;
        if stats.histogram.total() as usize != n {
            return Err(format!(
                "histogram counts sum to {}, want {n}",
                stats.histogram.total()
            ));
        }
        let partition: usize = stats.hourly.iter().map(|b| b.n).sum();
        if partition != n {
            return Err(format!("hourly groups cover {partition} of {n} samples"));
        }
        let mut hours: Vec<u32> = stats.hourly.iter().map(|b| b.hour).collect();
        hours.dedup();
        if hours.len() != stats.hourly.len() {
            return Err("duplicate hour groups".into());
        }
        Ok(format!(
            "quartiles exact, histogram sums to {n}, {} hour groups partition the samples",
            stats.hourly.len()
        ))
    });
}
