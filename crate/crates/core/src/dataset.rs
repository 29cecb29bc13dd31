//! In-memory datasets and their validation.
//!
//! A [`Dataset`] is immutable once built. Construction does not validate;
//! call [`validate_dataset`] (or [`Dataset::validated`]) before handing a
//! dataset to the splitter so every fold is guaranteed to be non-empty.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Binary,
    Multiclass,
    Regression,
}

impl TaskKind {
    pub fn is_classification(self) -> bool {
        !matches!(self, TaskKind::Regression)
    }

    /// The scoring function used for fold scores on this task.
    pub fn metric(self) -> crate::metrics::MetricKind {
        use crate::metrics::MetricKind;
        match self {
            TaskKind::Binary => MetricKind::F1Binary,
            TaskKind::Multiclass => MetricKind::F1Weighted,
            TaskKind::Regression => MetricKind::Mae,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Binary => "binary",
            TaskKind::Multiclass => "multiclass",
            TaskKind::Regression => "regression",
        }
    }

    /// Task implied by a class count: two classes is binary, more is multiclass.
    pub fn for_class_count(class_count: usize) -> TaskKind {
        if class_count <= 2 {
            TaskKind::Binary
        } else {
            TaskKind::Multiclass
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binary" => Ok(TaskKind::Binary),
            "multiclass" => Ok(TaskKind::Multiclass),
            "regression" => Ok(TaskKind::Regression),
            other => Err(format!("unknown task kind `{other}`")),
        }
    }
}

/// Target column: class indices for classification, reals for regression.
#[derive(Debug, Clone, PartialEq)]
pub enum Target<T> {
    Labels(Vec<usize>),
    Values(Vec<T>),
}

impl<T: Scalar> Target<T> {
    pub fn len(&self) -> usize {
        match self {
            Target::Labels(l) => l.len(),
            Target::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_labels(&self) -> Option<&[usize]> {
        match self {
            Target::Labels(l) => Some(l),
            Target::Values(_) => None,
        }
    }

    pub fn as_values(&self) -> Option<&[T]> {
        match self {
            Target::Values(v) => Some(v),
            Target::Labels(_) => None,
        }
    }

    /// Gathers the entries at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Target<T> {
        match self {
            Target::Labels(l) => Target::Labels(indices.iter().map(|&i| l[i]).collect()),
            Target::Values(v) => Target::Values(indices.iter().map(|&i| v[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    name: String,
    features: Array2<T>,
    target: Target<T>,
    task: TaskKind,
    class_count: Option<usize>,
    feature_names: Vec<String>,
    metadata: BTreeMap<String, String>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a classification dataset. Labels must already be class indices.
    pub fn classification(
        name: impl Into<String>,
        features: Array2<T>,
        labels: Vec<usize>,
        class_count: usize,
        feature_names: Vec<String>,
    ) -> Self {
        Dataset {
            name: name.into(),
            features,
            target: Target::Labels(labels),
            task: TaskKind::for_class_count(class_count),
            class_count: Some(class_count),
            feature_names,
            metadata: BTreeMap::new(),
        }
    }

    pub fn regression(
        name: impl Into<String>,
        features: Array2<T>,
        values: Vec<T>,
        feature_names: Vec<String>,
    ) -> Self {
        Dataset {
            name: name.into(),
            features,
            target: Target::Values(values),
            task: TaskKind::Regression,
            class_count: None,
            feature_names,
            metadata: BTreeMap::new(),
        }
    }

    /// Overrides the task kind. Only useful to build deliberately inconsistent
    /// datasets; the classification constructor derives the task itself.
    pub fn with_task(mut self, task: TaskKind) -> Self {
        self.task = task;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn features(&self) -> ArrayView2<'_, T> {
        self.features.view()
    }

    pub fn target(&self) -> &Target<T> {
        &self.target
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn class_count(&self) -> Option<usize> {
        self.class_count
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Returns the dataset unchanged when it passes [`validate_dataset`].
    pub fn validated(self, e_max: usize) -> Result<Self> {
        match validate_dataset(&self, e_max) {
            Ok(()) => Ok(self),
            Err(violations) => Err(Error::InvalidDataset {
                name: self.name.clone(),
                violations,
            }),
        }
    }

    /// Copies the rows at `indices` (in order) into a new feature matrix.
    pub fn select_features(&self, indices: &[usize]) -> Array2<T> {
        self.features.select(Axis(0), indices)
    }
}

/// A broken dataset invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowCountMismatch { rows: usize, targets: usize },
    FewerInstancesThanFolds { instances: usize, e_max: usize },
    TargetKindMismatch { task: TaskKind },
    BadClassCount { task: TaskKind, class_count: Option<usize> },
    LabelOutOfRange { row: usize, label: usize, class_count: usize },
    LabelAbsent { label: usize },
    NonFiniteFeature { row: usize, column: usize },
    NonFiniteTarget { row: usize },
    FeatureNameCount { names: usize, columns: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowCountMismatch { rows, targets } => {
                write!(f, "feature rows ({rows}) differ from target length ({targets})")
            }
            Violation::FewerInstancesThanFolds { instances, e_max } => {
                write!(f, "fewer instances than e_max ({instances} < {e_max})")
            }
            Violation::TargetKindMismatch { task } => {
                write!(f, "target representation does not match {task} task")
            }
            Violation::BadClassCount { task, class_count } => match class_count {
                Some(c) => write!(f, "class count {c} is invalid for a {task} task"),
                None => write!(f, "class count missing for a {task} task"),
            },
            Violation::LabelOutOfRange { row, label, class_count } => {
                write!(f, "row {row}: label {label} outside 0..{class_count}")
            }
            Violation::LabelAbsent { label } => write!(f, "label {label} absent"),
            Violation::NonFiniteFeature { row, column } => {
                write!(f, "row {row}, column {column}: non-finite feature value")
            }
            Violation::NonFiniteTarget { row } => write!(f, "row {row}: non-finite target"),
            Violation::FeatureNameCount { names, columns } => {
                write!(f, "{names} feature names for {columns} columns")
            }
        }
    }
}

/// Checks every dataset invariant against a fold count of `e_max`.
///
/// Returns all violations found, not just the first.
pub fn validate_dataset<T: Scalar>(d: &Dataset<T>, e_max: usize) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let rows = d.n_rows();
    let targets = d.target.len();
    if rows != targets {
        out.push(Violation::RowCountMismatch { rows, targets });
    }
    if rows.min(targets) < e_max {
        out.push(Violation::FewerInstancesThanFolds {
            instances: rows.min(targets),
            e_max,
        });
    }
    if !d.feature_names.is_empty() && d.feature_names.len() != d.n_features() {
        out.push(Violation::FeatureNameCount {
            names: d.feature_names.len(),
            columns: d.n_features(),
        });
    }
    for (row, lane) in d.features.outer_iter().enumerate() {
        for (column, v) in lane.iter().enumerate() {
            if !v.is_finite() {
                out.push(Violation::NonFiniteFeature { row, column });
            }
        }
    }

    match (&d.target, d.task) {
        (Target::Values(values), TaskKind::Regression) => {
            for (row, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation::NonFiniteTarget { row });
                }
            }
        }
        (Target::Labels(labels), task @ (TaskKind::Binary | TaskKind::Multiclass)) => {
            let count_ok = match (task, d.class_count) {
                (TaskKind::Binary, Some(2)) => true,
                (TaskKind::Multiclass, Some(c)) => c >= 3,
                _ => false,
            };
            if !count_ok {
                out.push(Violation::BadClassCount {
                    task,
                    class_count: d.class_count,
                });
            }
            if let Some(c) = d.class_count {
                let mut seen = vec![false; c];
                for (row, &label) in labels.iter().enumerate() {
                    if label < c {
                        seen[label] = true;
                    } else {
                        out.push(Violation::LabelOutOfRange {
                            row,
                            label,
                            class_count: c,
                        });
                    }
                }
                for (label, present) in seen.into_iter().enumerate() {
                    if !present {
                        out.push(Violation::LabelAbsent { label });
                    }
                }
            }
        }
        (_, task) => out.push(Violation::TargetKindMismatch { task }),
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
