//! e-fold cross-validation.
//!
//! k-fold cross-validation that stops before the last fold once the running
//! sample standard deviation of fold scores has settled. The [`controller`]
//! holds the stopping rule; [`harness`] runs it against full `e_max`-fold
//! ground truth and aggregates many runs.
//!
//! ```
//! use efold::{controller::run_sequence, EfoldConfig};
//!
//! let scores = [0.80f64, 0.90, 0.85, 0.85, 0.86, 0.84, 0.85, 0.85, 0.85, 0.85];
//! let d = run_sequence(EfoldConfig::default(), &scores).unwrap();
//! assert_eq!(d.stop_fold, 4);
//! assert!((d.final_mean - 0.85).abs() < 1e-12);
//! ```
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` and `*32` aliases below pin the common choices.

pub mod config;
pub mod controller;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod ingestion;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod splitting;

pub use config::{EfoldConfig, ScoreDirection, EARLIEST_STOP};
pub use controller::{run_sequence, StopDecision, StopStatus, StoppingState};
pub use dataset::{validate_dataset, Dataset, TaskKind, Target, Violation};
pub use error::{Error, Result};
pub use harness::{aggregate, evaluate_run, AggregateReport, CiOptions, RunFailure, RunMode, RunRecord};
pub use ingestion::{DatasetManifest, IngestError, SyntheticSpec, Transform};
pub use learners::{LearnerKind, LearnerSpec};
pub use scalar::Scalar;
pub use splitting::{assign_folds, FoldAssignment};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type StoppingState64 = StoppingState<f64>;
pub type StoppingState32 = StoppingState<f32>;
pub type RunRecord64 = RunRecord<f64>;
pub type RunRecord32 = RunRecord<f32>;
