use ndarray::ArrayView2;

use super::argmax;
use super::tree::DecisionTree;
use crate::scalar::Scalar;

/// SAMME boosting over depth-1 Gini stumps.
///
/// Each round fits a stump on the current sample weights and computes its
/// weighted error `err`. A stump with `err == 0` is kept with weight 1 and
/// ends training; a stump with `err >= 1 - 1/C` ends training and is
/// discarded, unless the ensemble is still empty. Otherwise the stump gets
/// weight `α = lr · (ln((1 - err) / err) + ln(C - 1))` and misclassified
/// samples are multiplied by `exp(α)` before renormalizing.
#[derive(Debug, Clone)]
pub struct AdaBoost<T> {
    stumps: Vec<(T, DecisionTree<T>)>,
    classes: usize,
}

impl<T: Scalar> AdaBoost<T> {
    pub fn fit(x: ArrayView2<'_, T>, labels: &[usize], classes: usize, rounds: usize, learning_rate: T) -> Self {
        let n = labels.len();
        let mut weights = vec![T::one() / T::of_usize(n); n];
        let mut stumps = Vec::new();
        let c = T::of_usize(classes.max(2));
        let worst = T::one() - T::one() / c;

        for _ in 0..rounds {
            let stump = DecisionTree::fit_classifier(x, labels, classes, Some(&weights), Some(1), 2);
            let pred = stump.predict_labels(x);
            let total: T = weights.iter().copied().sum();
            let err = pred
                .iter()
                .zip(labels)
                .zip(&weights)
                .filter(|((p, l), _)| p != l)
                .map(|(_, &w)| w)
                .sum::<T>()
                / total;

            if err <= T::zero() {
                stumps.push((T::one(), stump));
                break;
            }
            if err >= worst {
                if stumps.is_empty() {
                    stumps.push((T::one(), stump));
                }
                break;
            }
            let alpha = learning_rate * (((T::one() - err) / err).ln() + (c - T::one()).ln());
            let boost = alpha.exp();
            for (w, (p, l)) in weights.iter_mut().zip(pred.iter().zip(labels)) {
                if p != l {
                    *w = *w * boost;
                }
            }
            let total: T = weights.iter().copied().sum();
            for w in &mut weights {
                *w = *w / total;
            }
            stumps.push((alpha, stump));
        }
        AdaBoost { stumps, classes }
    }

    pub fn rounds(&self) -> usize {
        self.stumps.len()
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        let mut scores = vec![vec![T::zero(); self.classes]; rows.nrows()];
        for (alpha, stump) in &self.stumps {
            for (row, label) in scores.iter_mut().zip(stump.predict_labels(rows)) {
                row[label] = row[label] + *alpha;
            }
        }
        scores.iter().map(|s| argmax(s)).collect()
    }
}
