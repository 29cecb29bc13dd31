//! Seeded partitions of a dataset into `e_max` folds.
//!
//! Stratified assignment shuffles the instances of each class with the seed,
//! lays the classes end to end (class 0 first), and deals the sequence
//! round-robin into folds starting at a seed-derived fold offset. Because the
//! deal never restarts, both per-class and total fold sizes differ by at most
//! one. Plain assignment shuffles all indices and cuts them into contiguous
//! chunks, the first `n mod e_max` chunks one larger.

use ndarray::Array2;

use crate::dataset::{Dataset, Target};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitWarning {
    /// A class has fewer instances than folds, so some folds lack it.
    SmallClass { class: usize, count: usize, e_max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    e_max: usize,
    seed: u64,
    warnings: Vec<SplitWarning>,
}

impl FoldAssignment {
    /// Fold index (0-based) of every instance.
    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn e_max(&self) -> usize {
        self.e_max
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn warnings(&self) -> &[SplitWarning] {
        &self.warnings
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.e_max];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }

    /// Instance indices in fold `fold` (0-based), in dataset order.
    pub fn members(&self, fold: usize) -> Vec<usize> {
        self.fold_of
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }
}

fn check_size(n: usize, e_max: usize) -> Result<()> {
    if e_max == 0 {
        return Err(Error::InvalidConfig("e_max must be positive".into()));
    }
    if n < e_max {
        return Err(Error::InsufficientInstances { instances: n, e_max });
    }
    Ok(())
}

/// Class-stratified assignment. Requires class labels.
pub fn stratified_kfold<T: Scalar>(d: &Dataset<T>, e_max: usize, seed: u64) -> Result<FoldAssignment> {
    let labels = d.target().as_labels().ok_or_else(|| {
        Error::InvalidConfig(format!("stratified split of `{}` needs class labels", d.name()))
    })?;
    check_size(labels.len(), e_max)?;
    let class_count = d
        .class_count()
        .unwrap_or_else(|| labels.iter().max().map_or(0, |m| m + 1));

    let mut by_class = vec![Vec::new(); class_count];
    for (i, &label) in labels.iter().enumerate() {
        if label >= class_count {
            return Err(Error::InvalidConfig(format!(
                "label {label} at row {i} exceeds class count {class_count}"
            )));
        }
        by_class[label].push(i);
    }

    let mut rng = SeededRng::new(seed);
    let mut position = rng.below(e_max);
    let mut fold_of = vec![0; labels.len()];
    let mut warnings = Vec::new();
    for (class, members) in by_class.iter_mut().enumerate() {
        if !members.is_empty() && members.len() < e_max {
            warnings.push(SplitWarning::SmallClass {
                class,
                count: members.len(),
                e_max,
            });
        }
        rng.shuffle(members);
        for &i in members.iter() {
            fold_of[i] = position % e_max;
            position += 1;
        }
    }
    for w in &warnings {
        log::warn!("{}: {w:?}", d.name());
    }
    Ok(FoldAssignment {
        fold_of,
        e_max,
        seed,
        warnings,
    })
}

/// Shuffled assignment ignoring the target.
pub fn plain_kfold<T: Scalar>(d: &Dataset<T>, e_max: usize, seed: u64) -> Result<FoldAssignment> {
    let n = d.n_rows();
    check_size(n, e_max)?;
    let mut order: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut order);

    let base = n / e_max;
    let extra = n % e_max;
    let mut fold_of = vec![0; n];
    let mut start = 0;
    for fold in 0..e_max {
        let size = base + usize::from(fold < extra);
        for &i in &order[start..start + size] {
            fold_of[i] = fold;
        }
        start += size;
    }
    Ok(FoldAssignment {
        fold_of,
        e_max,
        seed,
        warnings: Vec::new(),
    })
}

/// Stratified for classification datasets, plain for regression.
pub fn assign_folds<T: Scalar>(d: &Dataset<T>, e_max: usize, seed: u64) -> Result<FoldAssignment> {
    if d.task().is_classification() {
        stratified_kfold(d, e_max, seed)
    } else {
        plain_kfold(d, e_max, seed)
    }
}

/// A subset of a dataset's rows, in original order.
#[derive(Debug, Clone)]
pub struct FoldView<'a, T> {
    dataset: &'a Dataset<T>,
    indices: Vec<usize>,
}

impl<'a, T: Scalar> FoldView<'a, T> {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dataset(&self) -> &'a Dataset<T> {
        self.dataset
    }

    pub fn features(&self) -> Array2<T> {
        self.dataset.select_features(&self.indices)
    }

    pub fn target(&self) -> Target<T> {
        self.dataset.target().select(&self.indices)
    }
}

/// Splits off fold `e` (1-based) for validation; the rest is the training set.
pub fn train_validation_split<'a, T: Scalar>(
    d: &'a Dataset<T>,
    a: &FoldAssignment,
    e: usize,
) -> Result<(FoldView<'a, T>, FoldView<'a, T>)> {
    if e == 0 || e > a.e_max {
        return Err(Error::FoldOutOfRange { fold: e, e_max: a.e_max });
    }
    if a.fold_of.len() != d.n_rows() {
        return Err(Error::LengthMismatch {
            left: a.fold_of.len(),
            right: d.n_rows(),
        });
    }
    let (validation, train): (Vec<usize>, Vec<usize>) =
        (0..d.n_rows()).partition(|&i| a.fold_of[i] == e - 1);
    Ok((
        FoldView { dataset: d, indices: train },
        FoldView {
            dataset: d,
            indices: validation,
        },
    ))
}
