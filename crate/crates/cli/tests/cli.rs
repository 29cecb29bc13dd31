use std::path::Path;
use std::process::Command;

use efold_cli::records::{read_records, COLUMNS, VERSION_LINE};
use efold_cli::{cmd_report, cmd_run, cmd_validate, RunOptions, RECORDS_FILE};

const SMALL: &str = r#"
runs_per_combination = 100
base_seed = 5
learners = ["gaussian_nb", "knn_classifier"]

[[datasets]]
source = "bundled"
name = "iris"

[[datasets]]
source = "synthetic"
name = "blobs"
spec = { kind = "gaussian_blobs", classes = 2, per_class = 30, dims = 3, spread = 3.0, seed = 1 }
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_one_row_per_job_and_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let summary = cmd_run(&RunOptions {
        config: write_config(dir.path(), SMALL),
        workers: Some(2),
        output_dir: Some(out.clone()),
        ..RunOptions::default()
    })
    .unwrap();
    assert_eq!(summary.rows.len(), 400);
    assert!(summary.failures.is_empty());

    let text = std::fs::read_to_string(out.join(RECORDS_FILE)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(VERSION_LINE));
    assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
    let rows = read_records(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 400);
    for c in 0..4 {
        assert_eq!(rows.iter().filter(|r| r.combination == c).count(), 100);
    }

    for name in ["summary.json", "summary.csv", "within_ci.csv", "stop_fold.csv", "pct_diff.csv"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let before = std::fs::read(out.join("summary.json")).unwrap();
    let again = dir.path().join("again");
    cmd_report(&out.join(RECORDS_FILE), Some(&again)).unwrap();
    assert_eq!(std::fs::read(again.join("summary.json")).unwrap(), before);
}

#[test]
fn report_rejects_empty_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(RECORDS_FILE);
    std::fs::write(&path, format!("{VERSION_LINE}\n{}\n", COLUMNS.join(","))).unwrap();
    let err = cmd_report(&path, None).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn validate_reports_incompatible_learners() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), SMALL);
    assert!(cmd_validate(&ok).is_empty());

    let bad = SMALL.replace("\"knn_classifier\"", "\"ridge\"");
    let problems = cmd_validate(&write_config(dir.path(), &bad));
    assert!(!problems.is_empty());
    assert!(problems.iter().any(|p| p.contains("ridge")), "{problems:?}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_efold");
    let dir = tempfile::tempdir().unwrap();

    let missing = Command::new(bin)
        .args(["run", "--config"])
        .arg(dir.path().join("nope.toml"))
        .status()
        .unwrap();
    assert_eq!(missing.code(), Some(1));

    let bad = write_config(dir.path(), "runs_per_combination = 0\nlearners = []\n");
    let status = Command::new(bin).args(["validate", "--config"]).arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(1));

    let good = write_config(dir.path(), &SMALL.replace("runs_per_combination = 100", "runs_per_combination = 3"));
    let out = dir.path().join("from-env");
    let status = Command::new(bin)
        .args(["run", "--config"])
        .arg(&good)
        .env("EFOLD_OUTPUT_DIR", &out)
        .env("RUST_LOG", "warn")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join(RECORDS_FILE).exists());
}
