use ndarray::{Array2, ArrayView1, ArrayView2};

use super::{argmax, stable_mean};
use crate::scalar::Scalar;

/// Indices of the `k` training rows closest to `query` (squared Euclidean),
/// ties broken by lower training index.
fn nearest<T: Scalar>(train: &Array2<T>, query: ArrayView1<'_, T>, k: usize) -> Vec<usize> {
    let mut dists: Vec<(T, usize)> = train
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let d: T = row.iter().zip(query.iter()).map(|(&a, &b)| (a - b) * (a - b)).sum();
            (d, i)
        })
        .collect();
    let k = k.min(dists.len());
    let by_distance =
        |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1));
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, by_distance);
        dists.truncate(k);
    }
    dists.sort_by(by_distance);
    dists.into_iter().map(|(_, i)| i).collect()
}

/// k-nearest-neighbour majority vote, uniform weights.
#[derive(Debug, Clone)]
pub struct KnnClassifier<T> {
    train: Array2<T>,
    labels: Vec<usize>,
    classes: usize,
    k: usize,
}

impl<T: Scalar> KnnClassifier<T> {
    pub fn fit(x: ArrayView2<'_, T>, labels: &[usize], classes: usize, k: usize) -> Self {
        KnnClassifier {
            train: x.to_owned(),
            labels: labels.to_vec(),
            classes,
            k: k.min(labels.len()),
        }
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        rows.rows()
            .into_iter()
            .map(|q| {
                let mut votes = vec![0usize; self.classes];
                for i in nearest(&self.train, q, self.k) {
                    votes[self.labels[i]] += 1;
                }
                argmax(&votes)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct KnnRegressor<T> {
    train: Array2<T>,
    targets: Vec<T>,
    k: usize,
}

impl<T: Scalar> KnnRegressor<T> {
    pub fn fit(x: ArrayView2<'_, T>, y: &[T], k: usize) -> Self {
        KnnRegressor {
            train: x.to_owned(),
            targets: y.to_vec(),
            k: k.min(y.len()),
        }
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<T> {
        rows.rows()
            .into_iter()
            .map(|q| stable_mean(nearest(&self.train, q, self.k).into_iter().map(|i| self.targets[i])))
            .collect()
    }
}
