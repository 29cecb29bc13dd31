//! The records file: one CSV row per run.
//!
//! The first line is `#efold-records v1`, followed by a header with the
//! columns in [`COLUMNS`]. Optional values are empty cells, `fold_scores` and
//! `fold_times_ms` are `;`-separated, and floats use the shortest text that
//! parses back to the same `f64`. `fold_times_ms` is the only column that
//! differs between identical runs.

use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;
use std::time::Duration;

use efold::{LearnerKind, RunMode, RunRecord64, StopStatus, TaskKind};
use thiserror::Error;

pub const VERSION_LINE: &str = "#efold-records v1";

pub const COLUMNS: [&str; 20] = [
    "combination",
    "dataset",
    "learner",
    "task",
    "run",
    "seed",
    "e_max",
    "mode",
    "status",
    "stop_fold",
    "m_e",
    "m_full",
    "ci_low",
    "ci_high",
    "within_ci",
    "pct_diff",
    "saved_folds",
    "saved_fraction",
    "fold_scores",
    "fold_times_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub combination: usize,
    pub run: usize,
    pub record: RunRecord64,
}

#[derive(Debug, Error)]
pub enum RecordsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("records file is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn status_str(s: StopStatus) -> &'static str {
    match s {
        StopStatus::Continue => "continue",
        StopStatus::StoppedEarly => "stopped_early",
        StopStatus::ExhaustedFolds => "exhausted_folds",
    }
}

fn parse_status(s: &str) -> Result<StopStatus, String> {
    match s {
        "continue" => Ok(StopStatus::Continue),
        "stopped_early" => Ok(StopStatus::StoppedEarly),
        "exhausted_folds" => Ok(StopStatus::ExhaustedFolds),
        other => Err(format!("unknown status `{other}`")),
    }
}

pub fn write_records<W: Write>(rows: &[RecordRow], out: W) -> Result<(), RecordsError> {
    let mut out = out;
    writeln!(out, "{VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        let r = &row.record;
        let join = |v: Vec<String>| v.join(";");
        w.write_record([
            row.combination.to_string(),
            r.dataset.clone(),
            r.learner.to_string(),
            r.task.to_string(),
            row.run.to_string(),
            r.seed.to_string(),
            r.e_max.to_string(),
            r.mode.to_string(),
            status_str(r.status).to_string(),
            r.stop_fold.to_string(),
            r.m_e.to_string(),
            opt(r.m_full),
            opt(r.ci_low),
            opt(r.ci_high),
            opt(r.within_ci),
            opt(r.pct_diff),
            r.saved_folds.to_string(),
            r.saved_fraction().to_string(),
            join(r.fold_scores.iter().map(ToString::to_string).collect()),
            join(r.fold_times.iter().map(|t| format!("{:.3}", t.as_secs_f64() * 1e3)).collect()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

struct Fields<'a> {
    record: &'a csv::StringRecord,
    line: usize,
}

impl Fields<'_> {
    fn err(&self, message: String) -> RecordsError {
        RecordsError::Malformed {
            line: self.line,
            message,
        }
    }

    fn raw(&self, i: usize) -> &str {
        self.record.get(i).unwrap_or("")
    }

    fn parse<T: FromStr>(&self, i: usize) -> Result<T, RecordsError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(i)
            .parse()
            .map_err(|e| self.err(format!("column `{}`: {e}", COLUMNS[i])))
    }

    fn parse_opt<T: FromStr>(&self, i: usize) -> Result<Option<T>, RecordsError>
    where
        T::Err: std::fmt::Display,
    {
        if self.raw(i).is_empty() {
            Ok(None)
        } else {
            self.parse(i).map(Some)
        }
    }

    fn parse_list<T: FromStr>(&self, i: usize) -> Result<Vec<T>, RecordsError>
    where
        T::Err: std::fmt::Display,
    {
        if self.raw(i).is_empty() {
            return Ok(Vec::new());
        }
        self.raw(i)
            .split(';')
            .map(|v| v.parse().map_err(|e| self.err(format!("column `{}`: {e}", COLUMNS[i]))))
            .collect()
    }
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RecordRow>, RecordsError> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim_end() != VERSION_LINE {
        return Err(RecordsError::Malformed {
            line: 1,
            message: format!("expected `{VERSION_LINE}`"),
        });
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(RecordsError::Malformed {
            line: 2,
            message: format!("header must be `{}`", COLUMNS.join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 3;
        let rec = rec.map_err(|e| RecordsError::Malformed {
            line,
            message: e.to_string(),
        })?;
        let f = Fields { record: &rec, line };
        let learner: LearnerKind = f.parse(2)?;
        let task: TaskKind = f.parse(3)?;
        let mode: RunMode = f.parse(7)?;
        let status = parse_status(f.raw(8)).map_err(|m| f.err(m))?;
        let fold_times: Vec<f64> = f.parse_list(19)?;
        let record = RunRecord64 {
            learner,
            dataset: f.raw(1).to_string(),
            task,
            seed: f.parse(5)?,
            e_max: f.parse(6)?,
            mode,
            fold_scores: f.parse_list(18)?,
            status,
            stop_fold: f.parse(9)?,
            m_e: f.parse(10)?,
            m_full: f.parse_opt(11)?,
            ci_low: f.parse_opt(12)?,
            ci_high: f.parse_opt(13)?,
            within_ci: f.parse_opt(14)?,
            pct_diff: f.parse_opt(15)?,
            saved_folds: f.parse(16)?,
            fold_times: fold_times.iter().map(|ms| Duration::from_secs_f64(ms.max(0.0) / 1e3)).collect(),
        };
        if record.stop_fold == 0 || record.stop_fold > record.e_max || record.saved_folds != record.e_max - record.stop_fold
        {
            return Err(f.err("stop_fold and saved_folds are inconsistent with e_max".into()));
        }
        rows.push(RecordRow {
            combination: f.parse(0)?,
            run: f.parse(4)?,
            record,
        });
    }
    if rows.is_empty() {
        return Err(RecordsError::Empty);
    }
    Ok(rows)
}

/// Drops the wall-time column so two records files can be compared.
pub fn strip_times(records_csv: &str) -> String {
    records_csv
        .lines()
        .map(|l| match l.rfind(',') {
            Some(i) if !l.starts_with('#') => &l[..i],
            _ => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}
