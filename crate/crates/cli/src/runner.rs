use efold::{evaluate_run, Dataset64, RunFailure};
use rayon::prelude::*;

use crate::config::{run_seed, ExperimentConfig};
use crate::records::RecordRow;

#[derive(Debug)]
pub struct FailedRun {
    pub combination: usize,
    pub run: usize,
    pub failure: RunFailure,
}

#[derive(Debug, Default)]
pub struct Outcome {
    /// Ordered by (combination, run) regardless of completion order.
    pub rows: Vec<RecordRow>,
    pub failures: Vec<FailedRun>,
}

/// Runs every (dataset, learner, run) job on a pool of `config.workers`
/// threads. `datasets` must be in config order.
pub fn run_experiment(config: &ExperimentConfig, datasets: &[Dataset64]) -> Result<Outcome, rayon::ThreadPoolBuildError> {
    let specs = config.learner_specs();
    let jobs: Vec<(usize, usize)> = (0..datasets.len() * specs.len())
        .flat_map(|c| (0..config.runs_per_combination).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    let results: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| {
                let d = &datasets[c / specs.len()];
                let spec = &specs[c % specs.len()];
                let seed = run_seed(config.base_seed, c, r);
                let out = evaluate_run(d, spec, &config.efold, seed, config.mode, config.ci_options());
                if r + 1 == config.runs_per_combination {
                    log::info!("{} on {}: run {} done", spec.kind, d.name(), r + 1);
                }
                (c, r, out)
            })
            .collect()
    });
    let mut outcome = Outcome::default();
    for (combination, run, out) in results {
        match out {
            Ok(record) => outcome.rows.push(RecordRow {
                combination,
                run,
                record,
            }),
            Err(failure) => outcome.failures.push(FailedRun {
                combination,
                run,
                failure,
            }),
        }
    }
    Ok(outcome)
}
