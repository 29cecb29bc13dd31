use efold::ingestion::bundled;
use efold::{aggregate, evaluate_run, CiOptions, Dataset, EfoldConfig, LearnerKind, LearnerSpec, RunMode, StopStatus};

#[test]
fn early_stop_mode_matches_simulation_prefix() {
    let d: Dataset<f64> = bundled::load("wine").unwrap();
    let cfg = EfoldConfig::default();
    for kind in LearnerKind::CLASSIFIERS {
        let spec = LearnerSpec::new(kind);
        for seed in [1, 2, 3] {
            let sim = evaluate_run(&d, &spec, &cfg, seed, RunMode::Simulate, CiOptions::default()).unwrap();
            let early = evaluate_run(&d, &spec, &cfg, seed, RunMode::EarlyStop, CiOptions::default()).unwrap();
            assert_eq!(sim.fold_scores.len(), cfg.e_max);
            assert_eq!(early.fold_scores.as_slice(), &sim.fold_scores[..early.stop_fold]);
            assert_eq!((early.stop_fold, early.status, early.m_e), (sim.stop_fold, sim.status, sim.m_e));
            assert!(early.m_full.is_none());
        }
    }
}

#[test]
fn simulated_records_are_internally_consistent() {
    let d: Dataset<f64> = bundled::load("iris").unwrap();
    let cfg = EfoldConfig::default();
    let spec = LearnerSpec::new(LearnerKind::KnnClassifier);
    let records: Vec<_> = (0..30)
        .map(|s| evaluate_run(&d, &spec, &cfg, s, RunMode::Simulate, CiOptions::default()).unwrap())
        .collect();
    for r in &records {
        assert!((4..=cfg.e_max).contains(&r.stop_fold));
        assert_eq!(r.saved_folds, cfg.e_max - r.stop_fold);
        assert_eq!(r.status == StopStatus::StoppedEarly, r.stop_fold < cfg.e_max);
        let full = r.m_full.unwrap();
        let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
        assert!(lo <= full && full <= hi);
        assert_eq!(r.within_ci, Some(lo <= r.m_e && r.m_e <= hi));
        assert_eq!(r.pct_diff.is_some(), r.stop_fold < cfg.e_max);
    }
    let report = aggregate(&records).unwrap();
    assert_eq!(report.runs, 30);
    let mass: f64 = report.stop_fold_histogram.iter().map(|b| b.fraction).sum();
    assert!((mass - 1.0).abs() < 1e-12);

    let again = evaluate_run(&d, &spec, &cfg, 7, RunMode::Simulate, CiOptions::default()).unwrap();
    assert_eq!(again.fold_scores, records[7].fold_scores);
}
