use ndarray::{Array2, ArrayView2, Axis};

use super::argmax;
use crate::scalar::Scalar;

/// Gaussian naive Bayes. Every per-class variance is padded by
/// `var_smoothing` times the largest feature variance of the training set.
#[derive(Debug, Clone)]
pub struct GaussianNb<T> {
    /// `None` for classes absent from the training set.
    log_priors: Vec<Option<T>>,
    means: Array2<T>,
    variances: Array2<T>,
}

fn column_stats<T: Scalar>(rows: &[usize], x: ArrayView2<'_, T>, j: usize) -> (T, T) {
    let n = T::of_usize(rows.len());
    let mean = rows.iter().map(|&i| x[[i, j]]).sum::<T>() / n;
    let var = rows.iter().map(|&i| (x[[i, j]] - mean).powi(2)).sum::<T>() / n;
    (mean, var)
}

impl<T: Scalar> GaussianNb<T> {
    pub fn fit(x: ArrayView2<'_, T>, labels: &[usize], classes: usize, var_smoothing: T) -> Self {
        let (n, p) = x.dim();
        let all: Vec<usize> = (0..n).collect();
        let max_var = (0..p)
            .map(|j| column_stats(&all, x, j).1)
            .fold(T::zero(), |m, v| m.max(v));
        // a constant training set still needs a positive variance floor
        let epsilon = var_smoothing * if max_var > T::zero() { max_var } else { T::one() };

        let mut members = vec![Vec::new(); classes];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        let mut means = Array2::zeros((classes, p));
        let mut variances = Array2::from_elem((classes, p), T::one());
        let mut log_priors = Vec::with_capacity(classes);
        for (c, rows) in members.iter().enumerate() {
            if rows.is_empty() {
                log_priors.push(None);
                continue;
            }
            log_priors.push(Some((T::of_usize(rows.len()) / T::of_usize(n)).ln()));
            for j in 0..p {
                let (mean, var) = column_stats(rows, x, j);
                means[[c, j]] = mean;
                variances[[c, j]] = var + epsilon;
            }
        }
        GaussianNb {
            log_priors,
            means,
            variances,
        }
    }

    /// Joint log-likelihood of each row under each class.
    pub fn joint_log_likelihood(&self, rows: ArrayView2<'_, T>) -> Array2<T> {
        let two_pi = T::of(std::f64::consts::TAU);
        let half = T::of(0.5);
        let classes = self.log_priors.len();
        let mut out = Array2::from_elem((rows.nrows(), classes), T::neg_infinity());
        for (c, prior) in self.log_priors.iter().enumerate() {
            let Some(prior) = *prior else { continue };
            let mean = self.means.row(c);
            let var = self.variances.row(c);
            let norm: T = var.iter().map(|&v| (two_pi * v).ln()).sum::<T>() * half;
            for (i, row) in rows.axis_iter(Axis(0)).enumerate() {
                let quad: T = row
                    .iter()
                    .zip(mean.iter().zip(var.iter()))
                    .map(|(&x, (&m, &v))| (x - m) * (x - m) / v)
                    .sum();
                out[[i, c]] = prior - norm - half * quad;
            }
        }
        out
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        let jll = self.joint_log_likelihood(rows);
        jll.rows()
            .into_iter()
            .map(|r| argmax(&r.to_vec()))
            .collect()
    }
}
