use thiserror::Error;

use crate::dataset::{TaskKind, Violation};
use crate::ingestion::IngestError;
use crate::learners::LearnerKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("insufficient instances: {instances} instances cannot fill {e_max} folds")]
    InsufficientInstances { instances: usize, e_max: usize },

    #[error("fold {fold} out of range 1..={e_max}")]
    FoldOutOfRange { fold: usize, e_max: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("controller already stopped")]
    AlreadyStopped,

    #[error("column count mismatch: model was trained on {expected} columns, got {got}")]
    ColumnMismatch { expected: usize, got: usize },

    #[error("{learner} cannot be used on a {task} task")]
    IncompatibleTask { learner: LearnerKind, task: TaskKind },

    #[error("hyperparameter error: {0}")]
    Hyperparameter(String),

    #[error("dataset `{name}` failed validation: {}", join_violations(.violations))]
    InvalidDataset {
        name: String,
        violations: Vec<Violation>,
    },

    #[error("percentage difference is undefined for a zero reference score")]
    ZeroReference,

    #[error(transparent)]
    Ingest(#[from] IngestError),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
