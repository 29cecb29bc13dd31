//! In-repo learners behind a uniform fit/predict contract.
//!
//! Every learner is deterministic. Hyperparameters live in a string-keyed map
//! pre-filled with the defaults below; overriding a key is allowed, unknown
//! keys are rejected.
//!
//! | kind | defaults |
//! |------|----------|
//! | `adaboost` | `n_estimators = 50`, `learning_rate = 1.0` (SAMME over depth-1 stumps) |
//! | `decision_tree_classifier` | `min_samples_split = 2` (Gini) |
//! | `gaussian_nb` | `var_smoothing = 1e-9` |
//! | `knn_classifier` | `k = 5` |
//! | `logistic_regression` | `c = 1.0`, `max_iter = 1000`, `tol = 1e-6` |
//! | `decision_tree_regressor` | `min_samples_split = 2` (squared error) |
//! | `knn_regressor` | `k = 5` |
//! | `lasso` | `alpha = 1.0`, `max_iter = 1000`, `tol = 1e-4` |
//! | `linear_regression` | none |
//! | `ridge` | `alpha = 1.0` |

mod adaboost;
mod knn;
mod linalg;
mod linear;
mod logistic;
mod naive_bayes;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{TaskKind, Target};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::splitting::FoldView;

pub use adaboost::AdaBoost;
pub use knn::{KnnClassifier, KnnRegressor};
pub use linear::{Lasso, LinearModel};
pub use logistic::LogisticRegression;
pub use naive_bayes::GaussianNb;
pub use tree::{DecisionTree, TreeCriterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    #[serde(rename = "adaboost")]
    AdaBoost,
    DecisionTreeClassifier,
    GaussianNb,
    KnnClassifier,
    LogisticRegression,
    DecisionTreeRegressor,
    KnnRegressor,
    Lasso,
    LinearRegression,
    Ridge,
}

impl LearnerKind {
    pub const CLASSIFIERS: [LearnerKind; 5] = [
        LearnerKind::AdaBoost,
        LearnerKind::DecisionTreeClassifier,
        LearnerKind::GaussianNb,
        LearnerKind::KnnClassifier,
        LearnerKind::LogisticRegression,
    ];

    pub const REGRESSORS: [LearnerKind; 5] = [
        LearnerKind::DecisionTreeRegressor,
        LearnerKind::KnnRegressor,
        LearnerKind::Lasso,
        LearnerKind::LinearRegression,
        LearnerKind::Ridge,
    ];

    pub fn is_classifier(self) -> bool {
        Self::CLASSIFIERS.contains(&self)
    }

    pub fn supports(self, task: TaskKind) -> bool {
        self.is_classifier() == task.is_classification()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::AdaBoost => "adaboost",
            LearnerKind::DecisionTreeClassifier => "decision_tree_classifier",
            LearnerKind::GaussianNb => "gaussian_nb",
            LearnerKind::KnnClassifier => "knn_classifier",
            LearnerKind::LogisticRegression => "logistic_regression",
            LearnerKind::DecisionTreeRegressor => "decision_tree_regressor",
            LearnerKind::KnnRegressor => "knn_regressor",
            LearnerKind::Lasso => "lasso",
            LearnerKind::LinearRegression => "linear_regression",
            LearnerKind::Ridge => "ridge",
        }
    }

    fn defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            LearnerKind::AdaBoost => &[("n_estimators", 50.0), ("learning_rate", 1.0)],
            LearnerKind::DecisionTreeClassifier | LearnerKind::DecisionTreeRegressor => {
                &[("min_samples_split", 2.0)]
            }
            LearnerKind::GaussianNb => &[("var_smoothing", 1e-9)],
            LearnerKind::KnnClassifier | LearnerKind::KnnRegressor => &[("k", 5.0)],
            LearnerKind::LogisticRegression => &[("c", 1.0), ("max_iter", 1000.0), ("tol", 1e-6)],
            LearnerKind::Lasso => &[("alpha", 1.0), ("max_iter", 1000.0), ("tol", 1e-4)],
            LearnerKind::LinearRegression => &[],
            LearnerKind::Ridge => &[("alpha", 1.0)],
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::CLASSIFIERS
            .iter()
            .chain(&Self::REGRESSORS)
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Hyperparameter(format!("unknown learner `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub hyperparameters: BTreeMap<String, f64>,
}

impl LearnerSpec {
    /// A spec carrying the default hyperparameters of `kind`.
    pub fn new(kind: LearnerKind) -> Self {
        LearnerSpec {
            kind,
            hyperparameters: kind
                .defaults()
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        if !self.hyperparameters.contains_key(key) {
            return Err(Error::Hyperparameter(format!("{} has no hyperparameter `{key}`", self.kind)));
        }
        self.hyperparameters.insert(key.to_string(), value);
        self.validate()?;
        Ok(self)
    }

    fn get(&self, key: &str) -> f64 {
        self.hyperparameters[key]
    }

    fn get_count(&self, key: &str) -> usize {
        self.get(key) as usize
    }

    pub fn validate(&self) -> Result<()> {
        for (key, &value) in &self.hyperparameters {
            if !self.kind.defaults().iter().any(|&(k, _)| k == key) {
                return Err(Error::Hyperparameter(format!("{} has no hyperparameter `{key}`", self.kind)));
            }
            let integral = matches!(key.as_str(), "n_estimators" | "k" | "max_iter" | "min_samples_split");
            let ok = value.is_finite()
                && if integral {
                    value >= 1.0 && value.fract() == 0.0
                } else {
                    value > 0.0 || (key == "alpha" && value == 0.0)
                };
            if !ok {
                return Err(Error::Hyperparameter(format!("{}: invalid {key} = {value}", self.kind)));
            }
        }
        Ok(())
    }
}

impl From<LearnerKind> for LearnerSpec {
    fn from(kind: LearnerKind) -> Self {
        LearnerSpec::new(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prediction<T> {
    Labels(Vec<usize>),
    Values(Vec<T>),
}

impl<T> Prediction<T> {
    pub fn len(&self) -> usize {
        match self {
            Prediction::Labels(l) => l.len(),
            Prediction::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
enum Model<T> {
    ConstantLabel(usize),
    AdaBoost(AdaBoost<T>),
    Tree(DecisionTree<T>),
    GaussianNb(GaussianNb<T>),
    KnnClassifier(KnnClassifier<T>),
    KnnRegressor(KnnRegressor<T>),
    Logistic(LogisticRegression<T>),
    Linear(LinearModel<T>),
}

#[derive(Debug, Clone)]
pub struct FittedModel<T> {
    kind: LearnerKind,
    training_size: usize,
    n_features: usize,
    model: Model<T>,
}

impl<T: Scalar> FittedModel<T> {
    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    pub fn training_size(&self) -> usize {
        self.training_size
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Result<Prediction<T>> {
        if rows.ncols() != self.n_features {
            return Err(Error::ColumnMismatch {
                expected: self.n_features,
                got: rows.ncols(),
            });
        }
        Ok(match &self.model {
            Model::ConstantLabel(label) => Prediction::Labels(vec![*label; rows.nrows()]),
            Model::AdaBoost(m) => Prediction::Labels(m.predict(rows)),
            Model::Tree(m) => m.predict(rows),
            Model::GaussianNb(m) => Prediction::Labels(m.predict(rows)),
            Model::KnnClassifier(m) => Prediction::Labels(m.predict(rows)),
            Model::KnnRegressor(m) => Prediction::Values(m.predict(rows)),
            Model::Logistic(m) => Prediction::Labels(m.predict(rows)),
            Model::Linear(m) => Prediction::Values(m.predict(rows)),
        })
    }
}

/// Fits `spec` on the rows `x` with targets `y`.
///
/// `class_count` is the size of the label space for classifiers; a training
/// set with a single distinct label always yields a constant classifier.
pub fn fit<T: Scalar>(
    spec: &LearnerSpec,
    x: ArrayView2<'_, T>,
    y: &Target<T>,
    class_count: Option<usize>,
) -> Result<FittedModel<T>> {
    spec.validate()?;
    if x.nrows() == 0 {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: y.len(),
        });
    }
    let model = match (y, spec.kind.is_classifier()) {
        (Target::Labels(labels), true) => {
            let classes = class_count.unwrap_or_else(|| labels.iter().max().map_or(1, |m| m + 1));
            if labels.iter().all(|&l| l == labels[0]) {
                Model::ConstantLabel(labels[0])
            } else {
                fit_classifier(spec, x, labels, classes)
            }
        }
        (Target::Values(values), false) => fit_regressor(spec, x, values),
        _ => {
            return Err(Error::IncompatibleTask {
                learner: spec.kind,
                task: match y {
                    Target::Labels(_) => TaskKind::for_class_count(class_count.unwrap_or(2)),
                    Target::Values(_) => TaskKind::Regression,
                },
            })
        }
    };
    Ok(FittedModel {
        kind: spec.kind,
        training_size: x.nrows(),
        n_features: x.ncols(),
        model,
    })
}

/// Fits on the rows of a fold view.
pub fn fit_view<T: Scalar>(spec: &LearnerSpec, view: &FoldView<'_, T>) -> Result<FittedModel<T>> {
    let x = view.features();
    fit(spec, x.view(), &view.target(), view.dataset().class_count())
}

fn fit_classifier<T: Scalar>(
    spec: &LearnerSpec,
    x: ArrayView2<'_, T>,
    labels: &[usize],
    classes: usize,
) -> Model<T> {
    match spec.kind {
        LearnerKind::AdaBoost => Model::AdaBoost(AdaBoost::fit(
            x,
            labels,
            classes,
            spec.get_count("n_estimators"),
            T::of(spec.get("learning_rate")),
        )),
        LearnerKind::DecisionTreeClassifier => Model::Tree(DecisionTree::fit_classifier(
            x,
            labels,
            classes,
            None,
            None,
            spec.get_count("min_samples_split"),
        )),
        LearnerKind::GaussianNb => {
            Model::GaussianNb(GaussianNb::fit(x, labels, classes, T::of(spec.get("var_smoothing"))))
        }
        LearnerKind::KnnClassifier => {
            Model::KnnClassifier(KnnClassifier::fit(x, labels, classes, spec.get_count("k")))
        }
        LearnerKind::LogisticRegression => Model::Logistic(LogisticRegression::fit(
            x,
            labels,
            classes,
            T::of(spec.get("c")),
            spec.get_count("max_iter"),
            T::of(spec.get("tol")),
        )),
        _ => unreachable!("regressor routed to classifier fit"),
    }
}

fn fit_regressor<T: Scalar>(spec: &LearnerSpec, x: ArrayView2<'_, T>, y: &[T]) -> Model<T> {
    match spec.kind {
        LearnerKind::DecisionTreeRegressor => Model::Tree(DecisionTree::fit_regressor(
            x,
            y,
            None,
            spec.get_count("min_samples_split"),
        )),
        LearnerKind::KnnRegressor => Model::KnnRegressor(KnnRegressor::fit(x, y, spec.get_count("k"))),
        LearnerKind::Lasso => Model::Linear(Lasso::fit(
            x,
            y,
            T::of(spec.get("alpha")),
            spec.get_count("max_iter"),
            T::of(spec.get("tol")),
        )),
        LearnerKind::LinearRegression => Model::Linear(LinearModel::fit_least_squares(x, y)),
        LearnerKind::Ridge => Model::Linear(LinearModel::fit_ridge(x, y, T::of(spec.get("alpha")))),
        _ => unreachable!("classifier routed to regressor fit"),
    }
}

/// Mean computed as an offset from the first value, so identical inputs
/// average to exactly that value.
pub(crate) fn stable_mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut iter = values.into_iter();
    let Some(first) = iter.next() else {
        return T::zero();
    };
    let mut n = 1usize;
    let mut offset = T::zero();
    for v in iter {
        offset = offset + (v - first);
        n += 1;
    }
    first + offset / T::of_usize(n)
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
