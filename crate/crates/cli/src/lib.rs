//! Batch runner for e-fold experiments: `run`, `validate` and `report`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 failed runs,
//! 3 I/O error.

pub mod config;
pub mod records;
pub mod report;
pub mod runner;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use efold::{aggregate, AggregateReport, RunMode};
use thiserror::Error;

use crate::config::{ExperimentConfig, FieldError};
use crate::records::{read_records, write_records, RecordRow};
use crate::runner::{run_experiment, FailedRun};

pub const RECORDS_FILE: &str = "records.csv";
pub const FAILURES_FILE: &str = "failures.csv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Config(Vec<FieldError>),
    #[error("{0}")]
    Input(String),
    #[error("{failed} of {total} runs failed (details in {path})")]
    Run { failed: usize, total: usize, path: PathBuf },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Run { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }
}

fn io_error(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Writes every file to a temporary sibling first and renames them only once
/// all writes succeeded.
pub fn write_files_atomically(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_error(format!("creating {}", dir.display())))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(format!("staging {name}")))?;
        tmp.write_all(bytes).map_err(io_error(format!("writing {name}")))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, path) in staged {
        tmp.persist(&path)
            .map_err(|e| io_error(format!("renaming into {}", path.display()))(e.error))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub mode: Option<RunMode>,
    pub workers: Option<usize>,
    pub allow_failures: bool,
    /// Takes precedence over the environment variable and the config.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub rows: Vec<RecordRow>,
    pub failures: Vec<FailedRun>,
    pub report: AggregateReport,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::from_file(path).map_err(|e| CliError::Config(vec![e]))
}

fn failures_csv(failures: &[FailedRun]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["combination", "run", "dataset", "learner", "seed", "fold", "error"])
        .expect("in-memory write");
    for f in failures {
        let r = &f.failure;
        w.write_record([
            f.combination.to_string(),
            f.run.to_string(),
            r.dataset.clone(),
            r.learner.to_string(),
            r.seed.to_string(),
            r.fold.map(|x| x.to_string()).unwrap_or_default(),
            r.source.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn report_files(report: &AggregateReport, rows: &[RecordRow]) -> Vec<(&'static str, Vec<u8>)> {
    report::render(report, rows)
        .into_iter()
        .map(|(n, s)| (n, s.into_bytes()))
        .collect()
}

pub fn cmd_run(opts: &RunOptions) -> Result<RunSummary, CliError> {
    let mut cfg = load_config(&opts.config)?;
    if let Some(m) = opts.mode {
        cfg.mode = m;
    }
    if let Some(w) = opts.workers {
        cfg.workers = w;
    }
    let problems = cfg.check_fields();
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    let datasets = cfg.load_datasets().map_err(CliError::Config)?;
    let output_dir = opts.output_dir.clone().unwrap_or_else(|| cfg.resolved_output_dir());

    log::info!(
        "{} combinations x {} runs, {} mode, {} workers",
        cfg.combination_count(),
        cfg.runs_per_combination,
        cfg.mode,
        cfg.workers
    );
    let outcome = run_experiment(&cfg, &datasets).map_err(|e| CliError::Input(format!("worker pool: {e}")))?;
    let total = outcome.rows.len() + outcome.failures.len();

    if !outcome.failures.is_empty() {
        for f in &outcome.failures {
            log::error!("{}", f.failure);
        }
        write_files_atomically(&output_dir, &[(FAILURES_FILE, failures_csv(&outcome.failures))])?;
        if !opts.allow_failures || outcome.rows.is_empty() {
            return Err(CliError::Run {
                failed: outcome.failures.len(),
                total,
                path: output_dir.join(FAILURES_FILE),
            });
        }
    }

    let records: Vec<_> = outcome.rows.iter().map(|r| r.record.clone()).collect();
    let report = aggregate(&records).map_err(|e| CliError::Input(e.to_string()))?;
    let mut buf = Vec::new();
    write_records(&outcome.rows, &mut buf).map_err(|e| CliError::Input(e.to_string()))?;
    let mut files = vec![(RECORDS_FILE, buf)];
    files.extend(report_files(&report, &outcome.rows));
    write_files_atomically(&output_dir, &files)?;

    Ok(RunSummary {
        output_dir,
        rows: outcome.rows,
        failures: outcome.failures,
        report,
    })
}

/// Every problem found in the config and its datasets; empty means ok.
pub fn cmd_validate(config: &Path) -> Vec<String> {
    let cfg = match ExperimentConfig::from_file(config) {
        Ok(c) => c,
        Err(e) => return vec![e.to_string()],
    };
    let mut problems: Vec<String> = cfg.check_fields().iter().map(ToString::to_string).collect();
    if let Err(errs) = cfg.load_datasets() {
        problems.extend(errs.iter().map(ToString::to_string));
    }
    problems
}

/// Recomputes the summary and plot files from a records file. They go next
/// to the records unless `output_dir` is given.
pub fn cmd_report(records: &Path, output_dir: Option<&Path>) -> Result<AggregateReport, CliError> {
    let file = std::fs::File::open(records).map_err(io_error(format!("opening {}", records.display())))?;
    let rows = read_records(file).map_err(|e| CliError::Input(format!("{}: {e}", records.display())))?;
    let list: Vec<_> = rows.iter().map(|r| r.record.clone()).collect();
    let report = aggregate(&list).map_err(|e| CliError::Input(e.to_string()))?;
    let dir = output_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| records.parent().unwrap_or(Path::new(".")).to_path_buf());
    write_files_atomically(&dir, &report_files(&report, &rows))?;
    Ok(report)
}
