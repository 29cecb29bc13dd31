use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RunRecord;
use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::scalar::Scalar;

/// Summary of percentage differences; all values in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PctDiffStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
}

impl PctDiffStats {
    fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        Some(PctDiffStats {
            count: n,
            mean: values.iter().sum::<f64>() / n as f64,
            median: quantile(&values, 0.5),
            p90: quantile(&values, 0.9),
            max: values[n - 1],
        })
    }
}

/// Linear interpolation between order statistics of sorted `v`.
fn quantile(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationStats {
    pub dataset: String,
    pub learner: LearnerKind,
    pub task: TaskKind,
    pub runs: usize,
    pub mean_stop_fold: f64,
    pub saved_fraction: f64,
    pub within_ci_fraction: Option<f64>,
    pub pct_diff: Option<PctDiffStats>,
    pub mean_m_e: f64,
    pub mean_m_full: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub stop_fold: usize,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub runs: usize,
    pub e_max: usize,
    pub mean_stop_fold: f64,
    /// Mean of `saved_folds / e_max`; equals `(e_max - mean_stop_fold) / e_max`.
    pub saved_fraction: f64,
    /// Over records that carry a CI verdict; absent when none do.
    pub within_ci_fraction: Option<f64>,
    pub stop_fold_histogram: Vec<HistogramBin>,
    /// Keyed by task name. Records that ran to `e_max` are excluded.
    pub pct_diff_by_task: BTreeMap<String, PctDiffStats>,
    pub combinations: Vec<CombinationStats>,
}

impl AggregateReport {
    pub fn histogram_mass(&self, stop_fold: usize) -> f64 {
        self.stop_fold_histogram
            .iter()
            .find(|b| b.stop_fold == stop_fold)
            .map_or(0.0, |b| b.fraction)
    }
}

#[derive(Default)]
struct Tally {
    runs: usize,
    stop_sum: usize,
    saved_sum: usize,
    ci_hits: usize,
    ci_total: usize,
    pct: Vec<f64>,
    m_e_sum: f64,
    m_full_sum: f64,
    m_full_count: usize,
}

impl Tally {
    fn add<T: Scalar>(&mut self, r: &RunRecord<T>) {
        self.runs += 1;
        self.stop_sum += r.stop_fold;
        self.saved_sum += r.saved_folds;
        if let Some(hit) = r.within_ci {
            self.ci_total += 1;
            self.ci_hits += usize::from(hit);
        }
        if r.stop_fold < r.e_max {
            if let Some(p) = r.pct_diff {
                self.pct.push(p.to_f64_lossy());
            }
        }
        self.m_e_sum += r.m_e.to_f64_lossy();
        if let Some(m) = r.m_full {
            self.m_full_sum += m.to_f64_lossy();
            self.m_full_count += 1;
        }
    }

    fn mean_stop(&self) -> f64 {
        self.stop_sum as f64 / self.runs as f64
    }

    fn saved(&self, e_max: usize) -> f64 {
        self.saved_sum as f64 / (self.runs * e_max) as f64
    }

    fn within(&self) -> Option<f64> {
        (self.ci_total > 0).then(|| self.ci_hits as f64 / self.ci_total as f64)
    }
}

/// Reduces run records into global and per-(dataset, learner) statistics.
///
/// The result does not depend on record order. All records must share one
/// `e_max`.
pub fn aggregate<T: Scalar>(records: &[RunRecord<T>]) -> Result<AggregateReport> {
    let first = records.first().ok_or(Error::TooFewValues { needed: 1, got: 0 })?;
    let e_max = first.e_max;
    if let Some(r) = records.iter().find(|r| r.e_max != e_max) {
        return Err(Error::InvalidConfig(format!(
            "records mix e_max values {e_max} and {}",
            r.e_max
        )));
    }

    let mut global = Tally::default();
    let mut by_combo: BTreeMap<(String, LearnerKind), (TaskKind, Tally)> = BTreeMap::new();
    let mut by_task: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();

    for r in records {
        global.add(r);
        by_combo
            .entry((r.dataset.clone(), r.learner))
            .or_insert_with(|| (r.task, Tally::default()))
            .1
            .add(r);
        if r.stop_fold < r.e_max {
            if let Some(p) = r.pct_diff {
                by_task.entry(r.task.to_string()).or_default().push(p.to_f64_lossy());
            }
        }
        *counts.entry(r.stop_fold).or_default() += 1;
    }

    let low = counts.keys().next().copied().unwrap_or(4).min(4);
    let stop_fold_histogram = (low..=e_max)
        .map(|f| {
            let count = counts.get(&f).copied().unwrap_or(0);
            HistogramBin {
                stop_fold: f,
                count,
                fraction: count as f64 / records.len() as f64,
            }
        })
        .collect();

    let combinations = by_combo
        .into_iter()
        .map(|((dataset, learner), (task, t))| CombinationStats {
            dataset,
            learner,
            task,
            runs: t.runs,
            mean_stop_fold: t.mean_stop(),
            saved_fraction: t.saved(e_max),
            within_ci_fraction: t.within(),
            mean_m_e: t.m_e_sum / t.runs as f64,
            mean_m_full: (t.m_full_count > 0).then(|| t.m_full_sum / t.m_full_count as f64),
            pct_diff: PctDiffStats::from_values(t.pct),
        })
        .collect();

    Ok(AggregateReport {
        runs: records.len(),
        e_max,
        mean_stop_fold: global.mean_stop(),
        saved_fraction: global.saved(e_max),
        within_ci_fraction: global.within(),
        stop_fold_histogram,
        pct_diff_by_task: by_task
            .into_iter()
            .filter_map(|(k, v)| PctDiffStats::from_values(v).map(|s| (k, s)))
            .collect(),
        combinations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::StopStatus;
    use crate::harness::RunMode;

    fn record(dataset: &str, stop_fold: usize, within: bool, pct: Option<f64>) -> RunRecord<f64> {
        RunRecord {
            learner: LearnerKind::GaussianNb,
            dataset: dataset.into(),
            task: TaskKind::Binary,
            seed: 0,
            e_max: 10,
            mode: RunMode::Simulate,
            fold_scores: vec![0.9; 10],
            status: if stop_fold < 10 { StopStatus::StoppedEarly } else { StopStatus::ExhaustedFolds },
            stop_fold,
            m_e: 0.9,
            m_full: Some(0.9),
            ci_low: Some(0.85),
            ci_high: Some(0.95),
            within_ci: Some(within),
            pct_diff: pct,
            saved_folds: 10 - stop_fold,
            fold_times: vec![],
        }
    }

    #[test]
    fn all_stop_at_four() {
        let rs: Vec<_> = (0..5).map(|_| record("a", 4, true, Some(0.0))).collect();
        let a = aggregate(&rs).unwrap();
        assert_eq!(a.mean_stop_fold, 4.0);
        assert!((a.saved_fraction - 0.6).abs() < 1e-15);
        assert_eq!(a.histogram_mass(4), 1.0);
        assert_eq!(a.stop_fold_histogram.len(), 7);
    }

    #[test]
    fn within_fraction_counts_every_record() {
        let rs: Vec<_> = (0..100).map(|i| record("a", 10, i >= 4, None)).collect();
        let a = aggregate(&rs).unwrap();
        assert_eq!(a.within_ci_fraction, Some(0.96));
        assert!(a.pct_diff_by_task.is_empty());
    }

    #[test]
    fn exhausted_records_never_reach_pct_stats() {
        // a stray pct value on an exhausted record must still be ignored
        let rs = vec![record("a", 10, true, Some(50.0)), record("a", 5, true, Some(1.0))];
        let a = aggregate(&rs).unwrap();
        let s = &a.pct_diff_by_task["binary"];
        assert_eq!((s.count, s.max), (1, 1.0));
        assert_eq!(a.combinations[0].pct_diff.as_ref().unwrap().count, 1);
    }

    #[test]
    fn order_independent_and_per_combination() {
        let mut rs = vec![
            record("b", 6, true, Some(2.0)),
            record("a", 4, false, Some(1.0)),
            record("a", 8, true, Some(3.0)),
        ];
        let a = aggregate(&rs).unwrap();
        rs.reverse();
        assert_eq!(a, aggregate(&rs).unwrap());
        assert_eq!(a.combinations.len(), 2);
        assert_eq!(a.combinations[0].dataset, "a");
        assert_eq!(a.combinations[0].mean_stop_fold, 6.0);
        assert_eq!(a.combinations[0].within_ci_fraction, Some(0.5));
        let s = &a.pct_diff_by_task["binary"];
        assert_eq!((s.median, s.mean), (2.0, 2.0));
        assert!((s.p90 - 2.8).abs() < 1e-12);
    }

    #[test]
    fn accounting_identity() {
        let rs: Vec<_> = [4, 5, 5, 7, 10, 9, 4].iter().map(|&f| record("a", f, true, None)).collect();
        let a = aggregate(&rs).unwrap();
        assert!((a.saved_fraction - (10.0 - a.mean_stop_fold) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_mixed_inputs_fail() {
        assert!(aggregate::<f64>(&[]).is_err());
        let mut r = record("a", 4, true, None);
        r.e_max = 12;
        assert!(aggregate(&[record("a", 4, true, None), r]).is_err());
    }
}
