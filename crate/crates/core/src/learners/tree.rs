//! CART trees with Gini (classification) or squared-error (regression) splits.
//!
//! Nodes are split until pure, smaller than `min_samples_split`, at the depth
//! limit, or without any candidate threshold. Candidate thresholds are the
//! midpoints between consecutive distinct values of a feature; a row goes left
//! when its value is `<=` the threshold. The best split minimizes the
//! weighted child impurity, and only a strictly better candidate replaces the
//! current one, so ties resolve to the lowest feature index and then the
//! lowest threshold.

use ndarray::ArrayView2;

use super::{argmax, stable_mean, Prediction};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeCriterion {
    Gini,
    SquaredError,
}

#[derive(Debug, Clone, PartialEq)]
enum Node<T> {
    Label(usize),
    Value(T),
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct DecisionTree<T> {
    nodes: Vec<Node<T>>,
    criterion: TreeCriterion,
}

enum Targets<'a, T> {
    Labels { labels: &'a [usize], weights: Vec<T>, classes: usize },
    Values(&'a [T]),
}

struct Builder<'a, T> {
    x: ArrayView2<'a, T>,
    targets: Targets<'a, T>,
    max_depth: Option<usize>,
    min_samples_split: usize,
    nodes: Vec<Node<T>>,
}

struct Candidate<T> {
    score: T,
    feature: usize,
    threshold: T,
}

impl<'a, T: Scalar> Builder<'a, T> {
    fn is_pure(&self, rows: &[usize]) -> bool {
        match &self.targets {
            Targets::Labels { labels, .. } => rows.iter().all(|&i| labels[i] == labels[rows[0]]),
            Targets::Values(y) => rows.iter().all(|&i| y[i] == y[rows[0]]),
        }
    }

    fn leaf(&self, rows: &[usize]) -> Node<T> {
        match &self.targets {
            Targets::Labels { labels, weights, classes } => {
                let mut totals = vec![T::zero(); *classes];
                for &i in rows {
                    totals[labels[i]] = totals[labels[i]] + weights[i];
                }
                Node::Label(argmax(&totals))
            }
            Targets::Values(y) => Node::Value(stable_mean(rows.iter().map(|&i| y[i]))),
        }
    }

    fn best_split(&self, rows: &[usize]) -> Option<Candidate<T>> {
        let mut best: Option<Candidate<T>> = None;
        let mut order = rows.to_vec();
        for feature in 0..self.x.ncols() {
            let col = self.x.column(feature);
            order.sort_by(|&a, &b| {
                col[a]
                    .partial_cmp(&col[b])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            let found = match &self.targets {
                Targets::Labels { labels, weights, classes } => {
                    sweep_gini(&order, col, labels, weights, *classes)
                }
                Targets::Values(y) => sweep_squared_error(&order, col, y),
            };
            if let Some((score, threshold)) = found {
                if best.as_ref().is_none_or(|b| score < b.score) {
                    best = Some(Candidate {
                        score,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn build(mut self, rows: Vec<usize>) -> Vec<Node<T>> {
        // (rows, depth, slot to fill)
        let mut stack = vec![(rows, 0usize, 0usize)];
        self.nodes.push(Node::Value(T::zero()));
        while let Some((rows, depth, slot)) = stack.pop() {
            let stop = rows.len() < self.min_samples_split
                || self.is_pure(&rows)
                || self.max_depth.is_some_and(|d| depth >= d);
            let split = if stop { None } else { self.best_split(&rows) };
            match split {
                None => self.nodes[slot] = self.leaf(&rows),
                Some(c) => {
                    let col = self.x.column(c.feature);
                    let (left, right): (Vec<usize>, Vec<usize>) =
                        rows.iter().partition(|&&i| col[i] <= c.threshold);
                    let l = self.nodes.len();
                    self.nodes.push(Node::Value(T::zero()));
                    self.nodes.push(Node::Value(T::zero()));
                    self.nodes[slot] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left: l,
                        right: l + 1,
                    };
                    stack.push((right, depth + 1, l + 1));
                    stack.push((left, depth + 1, l));
                }
            }
        }
        self.nodes
    }
}

/// Midpoint of two distinct sorted values that still separates them.
fn midpoint<T: Scalar>(lo: T, hi: T) -> T {
    let mid = lo + (hi - lo) / T::of(2.0);
    if mid >= hi {
        lo
    } else {
        mid
    }
}

/// Best (score, threshold) along one sorted feature, score being
/// `W_L·gini_L + W_R·gini_R`.
fn sweep_gini<T: Scalar>(
    order: &[usize],
    col: ndarray::ArrayView1<'_, T>,
    labels: &[usize],
    weights: &[T],
    classes: usize,
) -> Option<(T, T)> {
    let mut right = vec![T::zero(); classes];
    for &i in order {
        right[labels[i]] = right[labels[i]] + weights[i];
    }
    let mut right_w: T = right.iter().copied().sum();
    let mut left = vec![T::zero(); classes];
    let mut left_w = T::zero();
    let mut best: Option<(T, T)> = None;
    for pos in 0..order.len() - 1 {
        let i = order[pos];
        let w = weights[i];
        left[labels[i]] = left[labels[i]] + w;
        right[labels[i]] = right[labels[i]] - w;
        left_w = left_w + w;
        right_w = right_w - w;
        let (a, b) = (col[i], col[order[pos + 1]]);
        if a == b {
            continue;
        }
        let weighted_gini = |counts: &[T], total: T| {
            if total <= T::zero() {
                T::zero()
            } else {
                total - counts.iter().map(|&c| c * c).sum::<T>() / total
            }
        };
        let score = weighted_gini(&left, left_w) + weighted_gini(&right, right_w);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, midpoint(a, b)));
        }
    }
    best
}

/// Best (score, threshold) along one sorted feature, score being the total
/// within-child sum of squared errors.
fn sweep_squared_error<T: Scalar>(order: &[usize], col: ndarray::ArrayView1<'_, T>, y: &[T]) -> Option<(T, T)> {
    // shift by the first target to keep the running sums small
    let shift = y[order[0]];
    let total_sum: T = order.iter().map(|&i| y[i] - shift).sum();
    let total_sq: T = order.iter().map(|&i| (y[i] - shift).powi(2)).sum();
    let n = order.len();
    let mut left_sum = T::zero();
    let mut left_sq = T::zero();
    let mut best: Option<(T, T)> = None;
    for pos in 0..n - 1 {
        let i = order[pos];
        let v = y[i] - shift;
        left_sum = left_sum + v;
        left_sq = left_sq + v * v;
        let (a, b) = (col[i], col[order[pos + 1]]);
        if a == b {
            continue;
        }
        let nl = T::of_usize(pos + 1);
        let nr = T::of_usize(n - pos - 1);
        let right_sum = total_sum - left_sum;
        let right_sq = total_sq - left_sq;
        let score = (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, midpoint(a, b)));
        }
    }
    best
}

impl<T: Scalar> DecisionTree<T> {
    /// Classification tree. `weights` default to one per row.
    pub fn fit_classifier(
        x: ArrayView2<'_, T>,
        labels: &[usize],
        classes: usize,
        weights: Option<&[T]>,
        max_depth: Option<usize>,
        min_samples_split: usize,
    ) -> Self {
        let weights = weights.map_or_else(|| vec![T::one(); labels.len()], <[T]>::to_vec);
        let builder = Builder {
            x,
            targets: Targets::Labels { labels, weights, classes },
            max_depth,
            min_samples_split,
            nodes: Vec::new(),
        };
        DecisionTree {
            nodes: builder.build((0..labels.len()).collect()),
            criterion: TreeCriterion::Gini,
        }
    }

    pub fn fit_regressor(x: ArrayView2<'_, T>, y: &[T], max_depth: Option<usize>, min_samples_split: usize) -> Self {
        let builder = Builder {
            x,
            targets: Targets::Values(y),
            max_depth,
            min_samples_split,
            nodes: Vec::new(),
        };
        DecisionTree {
            nodes: builder.build((0..y.len()).collect()),
            criterion: TreeCriterion::SquaredError,
        }
    }

    pub fn criterion(&self) -> TreeCriterion {
        self.criterion
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
                _ => 0,
            }
        }
        walk(&self.nodes, 0)
    }

    fn leaf_index(&self, row: ndarray::ArrayView1<'_, T>) -> usize {
        let mut at = 0;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
        } = &self.nodes[at]
        {
            at = if row[*feature] <= *threshold { *left } else { *right };
        }
        at
    }

    fn leaf_for(&self, row: ndarray::ArrayView1<'_, T>) -> &Node<T> {
        &self.nodes[self.leaf_index(row)]
    }

    /// Index of the leaf each row lands in.
    pub fn apply(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        rows.rows().into_iter().map(|r| self.leaf_index(r)).collect()
    }

    pub fn predict_labels(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        rows.rows()
            .into_iter()
            .map(|r| match self.leaf_for(r) {
                Node::Label(l) => *l,
                _ => unreachable!("regression leaf in a classification tree"),
            })
            .collect()
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Prediction<T> {
        match self.criterion {
            TreeCriterion::Gini => Prediction::Labels(self.predict_labels(rows)),
            TreeCriterion::SquaredError => Prediction::Values(
                rows.rows()
                    .into_iter()
                    .map(|r| match self.leaf_for(r) {
                        Node::Value(v) => *v,
                        _ => unreachable!("classification leaf in a regression tree"),
                    })
                    .collect(),
            ),
        }
    }
}
