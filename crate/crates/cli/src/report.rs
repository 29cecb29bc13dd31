//! Summary documents and plot-data files derived from records.
//!
//! | file | columns |
//! |------|---------|
//! | `summary.json` | aggregate report |
//! | `summary.csv` | one row per (dataset, learner), then an `*` row for all runs |
//! | `within_ci.csv` | `bin_low,bin_high,combinations`: per-combination within-CI fraction, 5% bins |
//! | `stop_fold.csv` | `stop_fold,count,fraction` |
//! | `pct_diff.csv` | `task,bin_low,bin_high,count`: per-run % difference, 0.5-point bins |

use std::collections::BTreeMap;
use std::fmt::Write as _;

use efold::AggregateReport;
use serde::Serialize;

use crate::records::RecordRow;

pub const SUMMARY_VERSION: &str = "efold-summary v1";
const WITHIN_BINS: usize = 20;
const PCT_BIN_WIDTH: f64 = 0.5;

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema: &'static str,
    #[serde(flatten)]
    report: &'a AggregateReport,
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Every report file as (file name, contents), in a fixed order.
pub fn render(report: &AggregateReport, rows: &[RecordRow]) -> Vec<(&'static str, String)> {
    vec![
        ("summary.json", summary_json(report)),
        ("summary.csv", summary_csv(report)),
        ("within_ci.csv", within_ci_csv(report)),
        ("stop_fold.csv", stop_fold_csv(report)),
        ("pct_diff.csv", pct_diff_csv(rows)),
    ]
}

pub fn summary_json(report: &AggregateReport) -> String {
    let doc = SummaryDoc {
        schema: SUMMARY_VERSION,
        report,
    };
    serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
}

pub fn summary_csv(report: &AggregateReport) -> String {
    let mut s = String::from(
        "dataset,learner,task,runs,mean_stop_fold,saved_fraction,within_ci_fraction,mean_m_e,mean_m_full,pct_diff_count,pct_diff_mean,pct_diff_max\n",
    );
    for c in &report.combinations {
        let (count, mean, max) = match &c.pct_diff {
            Some(p) => (p.count.to_string(), p.mean.to_string(), p.max.to_string()),
            None => ("0".into(), String::new(), String::new()),
        };
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.dataset,
            c.learner,
            c.task,
            c.runs,
            c.mean_stop_fold,
            c.saved_fraction,
            opt(c.within_ci_fraction),
            c.mean_m_e,
            opt(c.mean_m_full),
            count,
            mean,
            max
        )
        .unwrap();
    }
    writeln!(
        s,
        "*,*,*,{},{},{},{},,,,,",
        report.runs,
        report.mean_stop_fold,
        report.saved_fraction,
        opt(report.within_ci_fraction)
    )
    .unwrap();
    s
}

pub fn within_ci_csv(report: &AggregateReport) -> String {
    let mut counts = [0usize; WITHIN_BINS];
    for f in report.combinations.iter().filter_map(|c| c.within_ci_fraction) {
        let bin = ((f * WITHIN_BINS as f64).floor() as usize).min(WITHIN_BINS - 1);
        counts[bin] += 1;
    }
    let mut s = String::from("bin_low,bin_high,combinations\n");
    for (i, n) in counts.iter().enumerate() {
        writeln!(s, "{:.2},{:.2},{n}", i as f64 / WITHIN_BINS as f64, (i + 1) as f64 / WITHIN_BINS as f64).unwrap();
    }
    s
}

pub fn stop_fold_csv(report: &AggregateReport) -> String {
    let mut s = String::from("stop_fold,count,fraction\n");
    for b in &report.stop_fold_histogram {
        writeln!(s, "{},{},{}", b.stop_fold, b.count, b.fraction).unwrap();
    }
    s
}

/// Same exclusion as the aggregate: runs that used every fold carry no value.
pub fn pct_diff_csv(rows: &[RecordRow]) -> String {
    let mut by_task: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    for r in rows.iter().map(|r| &r.record) {
        if let (true, Some(p)) = (r.stop_fold < r.e_max, r.pct_diff) {
            let bin = (p / PCT_BIN_WIDTH).floor() as usize;
            *by_task.entry(r.task.to_string()).or_default().entry(bin).or_default() += 1;
        }
    }
    let mut s = String::from("task,bin_low,bin_high,count\n");
    for (task, bins) in by_task {
        let last = bins.keys().next_back().copied().unwrap_or(0);
        for i in 0..=last {
            let n = bins.get(&i).copied().unwrap_or(0);
            writeln!(s, "{task},{},{},{n}", i as f64 * PCT_BIN_WIDTH, (i + 1) as f64 * PCT_BIN_WIDTH).unwrap();
        }
    }
    s
}
