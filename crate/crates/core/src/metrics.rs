//! Fold scoring functions and the descriptive statistics the stopping rule uses.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    F1Binary,
    F1Weighted,
    Mae,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::F1Binary => "f1",
            MetricKind::F1Weighted => "weighted_f1",
            MetricKind::Mae => "mae",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score<T> {
    pub value: T,
    pub metric: MetricKind,
}

/// Label used as the positive class for binary F1.
pub const POSITIVE_LABEL: usize = 1;

fn check_lengths(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    Ok(())
}

/// `2TP / (2TP + FP + FN)`, or 0 when that denominator is 0.
fn f1_from_counts<T: Scalar>(tp: usize, fp: usize, fn_: usize) -> T {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        T::zero()
    } else {
        T::of_usize(2 * tp) / T::of_usize(denom)
    }
}

fn one_vs_rest_counts(y_true: &[usize], y_pred: &[usize], class: usize) -> (usize, usize, usize) {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == class, p == class) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    (tp, fp, fn_)
}

pub fn f1_binary<T: Scalar>(y_true: &[usize], y_pred: &[usize], positive_label: usize) -> Result<Score<T>> {
    check_lengths(y_true.len(), y_pred.len())?;
    let (tp, fp, fn_) = one_vs_rest_counts(y_true, y_pred, positive_label);
    Ok(Score {
        value: f1_from_counts(tp, fp, fn_),
        metric: MetricKind::F1Binary,
    })
}

/// Support-weighted mean of one-vs-rest F1 over the classes present in `y_true`.
pub fn f1_weighted<T: Scalar>(y_true: &[usize], y_pred: &[usize], class_count: usize) -> Result<Score<T>> {
    check_lengths(y_true.len(), y_pred.len())?;
    let mut support = vec![0usize; class_count];
    for &t in y_true {
        if t < class_count {
            support[t] += 1;
        }
    }
    let n = T::of_usize(y_true.len());
    let mut value = T::zero();
    for (class, &s) in support.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let (tp, fp, fn_) = one_vs_rest_counts(y_true, y_pred, class);
        value = value + T::of_usize(s) / n * f1_from_counts::<T>(tp, fp, fn_);
    }
    Ok(Score {
        value,
        metric: MetricKind::F1Weighted,
    })
}

pub fn mae<T: Scalar>(y_true: &[T], y_pred: &[T]) -> Result<Score<T>> {
    check_lengths(y_true.len(), y_pred.len())?;
    let total: T = y_true.iter().zip(y_pred).map(|(&t, &p)| (t - p).abs()).sum();
    let value = total / T::of_usize(y_true.len());
    if !value.is_finite() {
        return Err(Error::NonFinite("mean absolute error"));
    }
    Ok(Score {
        value,
        metric: MetricKind::Mae,
    })
}

pub fn running_mean<T: Scalar>(xs: &[T]) -> Result<T> {
    if xs.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    Ok(xs.iter().copied().sum::<T>() / T::of_usize(xs.len()))
}

/// Standard deviation with divisor `n - 1`.
pub fn sample_std<T: Scalar>(xs: &[T]) -> Result<T> {
    if xs.len() < 2 {
        return Err(Error::TooFewValues { needed: 2, got: xs.len() });
    }
    // Shifting by the first value keeps constant inputs at exactly zero.
    let shift = xs[0];
    let mean = xs.iter().map(|&x| x - shift).sum::<T>() / T::of_usize(xs.len());
    let ss: T = xs
        .iter()
        .map(|&x| {
            let d = x - shift - mean;
            d * d
        })
        .sum();
    Ok((ss / T::of_usize(xs.len() - 1)).sqrt())
}
