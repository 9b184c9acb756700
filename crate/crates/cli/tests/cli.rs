//! End-to-end runs of the binary on a small synthetic dataset: every
//! subcommand, exit codes, determinism, and flag/file precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chronocast"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn chronocast");
    assert!(
        out.status.success(),
        "chronocast {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("spawn chronocast");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

/// Shared tiny workspace: generate + prepare once, train a small FNN once.
struct Fixture {
    #[allow(dead_code)]
    tmp: tempfile::TempDir,
    data_dir: PathBuf,
    bundle_dir: PathBuf,
    model_dir: PathBuf,
}

fn fixture() -> Fixture {
    let tmp = tempfile::tempdir().unwrap();
    let data_dir = tmp.path().join("data");
    let bundle_dir = tmp.path().join("bundle");
    let model_dir = tmp.path().join("model");
    run_ok(&[
        "generate",
        "--out",
        &path_str(&data_dir),
        "--seed",
        "7",
        "--n-hours",
        "700",
    ]);
    run_ok(&[
        "prepare",
        "--data",
        &path_str(&data_dir.join("data.csv")),
        "--out",
        &path_str(&bundle_dir),
    ]);
    run_ok(&[
        "train",
        "--bundle",
        &path_str(&bundle_dir),
        "--out",
        &path_str(&model_dir),
        "--model",
        "fnn",
        "--max-epochs",
        "2",
        "--batch-size",
        "32",
        "--seed",
        "7",
    ]);
    Fixture {
        tmp,
        data_dir,
        bundle_dir,
        model_dir,
    }
}

#[test]
fn full_pipeline_emits_expected_artifacts() {
    let fx = fixture();
    assert!(fx.data_dir.join("data.csv").exists());
    assert!(fx.data_dir.join("stats.json").exists());
    for f in ["features.csv", "scaler.json", "splits.json"] {
        assert!(fx.bundle_dir.join(f).exists(), "missing bundle file {f}");
    }
    assert!(fx.model_dir.join("checkpoint.json").exists());
    assert!(fx.model_dir.join("history.csv").exists());

    let eval_dir = fx.tmp.path().join("eval");
    run_ok(&[
        "evaluate",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--checkpoint",
        &path_str(&fx.model_dir.join("checkpoint.json")),
        "--out",
        &path_str(&eval_dir),
    ]);
    for f in [
        "metrics.json",
        "predictions.csv",
        "residual_histogram.csv",
        "residual_kde.csv",
        "hourly_error_box.csv",
        "error_over_time.csv",
        "confusion.csv",
        "predictions.svg",
        "error_over_time.svg",
        "residual_histogram.svg",
        "error_histogram.svg",
    ] {
        assert!(eval_dir.join(f).exists(), "missing evaluation artifact {f}");
    }

    // Metrics JSON exposes the required fields on both scales.
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval_dir.join("metrics.json")).unwrap())
            .unwrap();
    for scale in ["normalized", "original_kwh"] {
        for key in ["mae", "rmse", "mape_percent", "pearson_r", "r_squared"] {
            assert!(
                !metrics[scale][key].is_null() || key == "mape_percent",
                "metrics.json missing {scale}.{key}"
            );
        }
    }

    // Predictions CSV has one row per test window plus the header.
    let n_test = {
        let splits: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(fx.bundle_dir.join("splits.json")).unwrap(),
        )
        .unwrap();
        let test = &splits["splits"]["test"];
        (test["end"].as_u64().unwrap() - test["start"].as_u64().unwrap()) as usize
            - splits["window"].as_u64().unwrap() as usize
    };
    let lines = std::fs::read_to_string(eval_dir.join("predictions.csv")).unwrap();
    assert_eq!(lines.lines().count(), n_test + 1);
}

#[test]
fn generate_is_deterministic_and_seed_flag_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_ok(&["generate", "--out", &path_str(&a), "--seed", "42", "--n-hours", "300"]);
    run_ok(&["generate", "--out", &path_str(&b), "--seed", "42", "--n-hours", "300"]);
    assert_eq!(
        std::fs::read(a.join("data.csv")).unwrap(),
        std::fs::read(b.join("data.csv")).unwrap()
    );
    let c = tmp.path().join("c");
    run_ok(&["generate", "--out", &path_str(&c), "--seed", "43", "--n-hours", "300"]);
    assert_ne!(
        std::fs::read(a.join("data.csv")).unwrap(),
        std::fs::read(c.join("data.csv")).unwrap()
    );
}

#[test]
fn config_file_flag_and_env_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 9, "n_hours": 300}"#).unwrap();

    // File value applies when no flag is given.
    let a = tmp.path().join("a");
    run_ok(&["generate", "--out", &path_str(&a), "--config", &path_str(&cfg)]);
    let rows = std::fs::read_to_string(a.join("data.csv")).unwrap().lines().count();
    assert_eq!(rows, 301);

    // Flag overrides file.
    let b = tmp.path().join("b");
    run_ok(&[
        "generate",
        "--out",
        &path_str(&b),
        "--config",
        &path_str(&cfg),
        "--n-hours",
        "400",
    ]);
    let rows = std::fs::read_to_string(b.join("data.csv")).unwrap().lines().count();
    assert_eq!(rows, 401);

    // Env var seeds only when neither flag nor file has one.
    let cfg2 = tmp.path().join("run2.json");
    std::fs::write(&cfg2, r#"{"n_hours": 300}"#).unwrap();
    let c = tmp.path().join("c");
    let out = bin()
        .args(["generate", "--out", &path_str(&c), "--config", &path_str(&cfg2)])
        .env("CHRONOCAST_SEED", "9")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(a.join("data.csv")).unwrap(),
        std::fs::read(c.join("data.csv")).unwrap()
    );

    // Unknown config keys are rejected as usage errors.
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"n_hour": 300}"#).unwrap();
    let (code, err) = run_code(&["generate", "--out", &path_str(&c), "--config", &path_str(&bad)]);
    assert_eq!(code, 1, "stderr: {err}");
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    // Usage error: unknown flag.
    let (code, _) = run_code(&["generate", "--no-such-flag"]);
    assert_eq!(code, 1);
    // Usage error: invalid generator config (threshold documented at 169).
    let (code, err) = run_code(&[
        "generate",
        "--out",
        &path_str(&tmp.path().join("x")),
        "--n-hours",
        "100",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("169"), "stderr should name the threshold: {err}");
    // Data error: missing input file.
    let (code, _) = run_code(&[
        "prepare",
        "--data",
        &path_str(&tmp.path().join("absent.csv")),
        "--out",
        &path_str(&tmp.path().join("y")),
    ]);
    assert_eq!(code, 2);
    // Schema error: malformed CSV header.
    let csv = tmp.path().join("bad.csv");
    std::fs::write(&csv, "timestamp,consumption_kwh\n2017-01-01T00:00:00Z,1\n").unwrap();
    let (code, err) = run_code(&[
        "prepare",
        "--data",
        &path_str(&csv),
        "--out",
        &path_str(&tmp.path().join("z")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("header"), "stderr: {err}");
}

#[test]
fn missing_column_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("short.csv");
    std::fs::write(
        &csv,
        "timestamp,consumption_kwh,temperature_c,wind_speed_ms\n",
    )
    .unwrap();
    let (code, err) = run_code(&[
        "prepare",
        "--data",
        &path_str(&csv),
        "--out",
        &path_str(&tmp.path().join("o")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("humidity_pct"), "stderr: {err}");
}

#[test]
fn train_is_deterministic_across_runs() {
    let fx = fixture();
    let again = fx.tmp.path().join("model2");
    run_ok(&[
        "train",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&again),
        "--model",
        "fnn",
        "--max-epochs",
        "2",
        "--batch-size",
        "32",
        "--seed",
        "7",
    ]);
    assert_eq!(
        std::fs::read(fx.model_dir.join("checkpoint.json")).unwrap(),
        std::fs::read(again.join("checkpoint.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(fx.model_dir.join("history.csv")).unwrap(),
        std::fs::read(again.join("history.csv")).unwrap()
    );
}

#[test]
fn lstm_checkpoint_records_default_hyperparameters() {
    let fx = fixture();
    let dir = fx.tmp.path().join("lstm-default");
    run_ok(&[
        "train",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&dir),
        "--model",
        "lstm",
        "--max-epochs",
        "2",
    ]);
    let ckpt: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("checkpoint.json")).unwrap())
            .unwrap();
    assert_eq!(ckpt["model_kind"], "lstm");
    assert_eq!(ckpt["hyperparameters"]["hidden"], 50);
    assert_eq!(ckpt["hyperparameters"]["dropout"], 0.2);
    assert_eq!(ckpt["hyperparameters"]["window"], 24);
}

#[test]
fn arima_training_records_order_in_checkpoint() {
    let fx = fixture();
    let dir = fx.tmp.path().join("arima");
    run_ok(&[
        "train",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&dir),
        "--model",
        "arima",
    ]);
    let ckpt: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("checkpoint.json")).unwrap())
            .unwrap();
    assert_eq!(ckpt["model_kind"], "arima");
    assert!(ckpt["hyperparameters"]["arima_order"]["p"].is_u64());
    assert!(ckpt["params"]["ar"].is_array());
}

#[test]
fn evaluate_rejects_mismatched_bundle() {
    let fx = fixture();
    // Build a second bundle from different data; the digest must differ.
    let data2 = fx.tmp.path().join("data2");
    let bundle2 = fx.tmp.path().join("bundle2");
    run_ok(&[
        "generate", "--out", &path_str(&data2), "--seed", "8", "--n-hours", "700",
    ]);
    run_ok(&[
        "prepare",
        "--data",
        &path_str(&data2.join("data.csv")),
        "--out",
        &path_str(&bundle2),
    ]);
    let (code, err) = run_code(&[
        "evaluate",
        "--bundle",
        &path_str(&bundle2),
        "--checkpoint",
        &path_str(&fx.model_dir.join("checkpoint.json")),
        "--out",
        &path_str(&fx.tmp.path().join("e2")),
    ]);
    assert_eq!(code, 2, "stderr: {err}");
    assert!(err.contains("digest"), "stderr: {err}");
}

#[test]
fn forecast_at_history_end_and_insufficient_history() {
    let fx = fixture();
    // Find the last timestamp of the generated data.
    let data = std::fs::read_to_string(fx.data_dir.join("data.csv")).unwrap();
    let last_ts = data.lines().last().unwrap().split(',').next().unwrap().to_string();
    let out = run_ok(&[
        "forecast",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--checkpoint",
        &path_str(&fx.model_dir.join("checkpoint.json")),
        "--data",
        &path_str(&fx.data_dir.join("data.csv")),
        "--at",
        &last_ts,
    ]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let kwh: f64 = text
        .split("forecast for ")
        .nth(1)
        .and_then(|s| s.split(": ").nth(1))
        .and_then(|s| s.split(' ').next())
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| panic!("cannot parse forecast output: {text}"));
    assert!(kwh.is_finite() && (0.0..=1000.0).contains(&kwh), "{text}");

    // Repeating the call gives identical output.
    let again = run_ok(&[
        "forecast",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--checkpoint",
        &path_str(&fx.model_dir.join("checkpoint.json")),
        "--data",
        &path_str(&fx.data_dir.join("data.csv")),
        "--at",
        &last_ts,
    ]);
    assert_eq!(out.stdout, again.stdout);

    // Ten hours of history are not enough (needs 192).
    let short_csv = fx.tmp.path().join("short.csv");
    let mut lines: Vec<&str> = data.lines().collect();
    let keep = lines.split_off(lines.len() - 10);
    let mut short = String::from("timestamp,consumption_kwh,temperature_c,humidity_pct,wind_speed_ms\n");
    for l in keep {
        short.push_str(l);
        short.push('\n');
    }
    std::fs::write(&short_csv, short).unwrap();
    let (code, err) = run_code(&[
        "forecast",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--checkpoint",
        &path_str(&fx.model_dir.join("checkpoint.json")),
        "--data",
        &path_str(&short_csv),
        "--at",
        &last_ts,
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("192"), "stderr should state the required span: {err}");
}

#[test]
fn report_produces_table_json_and_per_model_artifacts() {
    let fx = fixture();
    let dir = fx.tmp.path().join("report");
    let out = run_ok(&[
        "report",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&dir),
        "--seed",
        "7",
        "--max-epochs",
        "2",
        "--hidden",
        "6",
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["ARIMA", "FNN", "GRU", "LSTM"] {
        assert!(stdout.contains(name), "table missing {name}: {stdout}");
    }
    assert!(dir.join("report.txt").exists());
    assert!(dir.join("report.json").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["models"].as_array().unwrap().len(), 4);
    assert_eq!(report["config"]["max_epochs"], 2);
    for model in ["arima", "fnn", "gru", "lstm"] {
        assert!(
            dir.join(model).join("metrics.json").exists(),
            "missing per-model artifacts for {model}"
        );
        assert!(dir.join(model).join("checkpoint.json").exists());
    }

    // JSON format prints the report document to stdout.
    let dir2 = fx.tmp.path().join("report2");
    let out2 = run_ok(&[
        "report",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&dir2),
        "--seed",
        "7",
        "--max-epochs",
        "2",
        "--hidden",
        "6",
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value =
        serde_json::from_slice(&out2.stdout).expect("stdout should be the JSON report");
    assert_eq!(parsed["models"].as_array().unwrap().len(), 4);

    // Identical seeds give byte-identical reports.
    assert_eq!(
        std::fs::read(dir.join("report.json")).unwrap(),
        std::fs::read(dir2.join("report.json")).unwrap()
    );
}

#[test]
fn report_and_evaluate_round_trip_on_each_checkpoint() {
    // Per-model checkpoints written by report must evaluate cleanly.
    let fx = fixture();
    let dir = fx.tmp.path().join("report");
    run_ok(&[
        "report",
        "--bundle",
        &path_str(&fx.bundle_dir),
        "--out",
        &path_str(&dir),
        "--seed",
        "7",
        "--max-epochs",
        "1",
        "--hidden",
        "4",
    ]);
    for model in ["arima", "lstm"] {
        let eval_dir = fx.tmp.path().join(format!("recheck-{model}"));
        run_ok(&[
            "evaluate",
            "--bundle",
            &path_str(&fx.bundle_dir),
            "--checkpoint",
            &path_str(&dir.join(model).join("checkpoint.json")),
            "--out",
            &path_str(&eval_dir),
        ]);
        assert!(eval_dir.join("metrics.json").exists());
    }
}
