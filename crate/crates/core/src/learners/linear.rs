//! Ordinary least squares, ridge, and lasso. All three leave the intercept
//! unpenalized by fitting on column-centered data and recovering the
//! intercept as `mean(y) - mean(x)·w`.

use ndarray::{Array1, Array2, ArrayView2};

use super::linalg::{center_columns, center_vector, cholesky_solve, min_norm_lstsq};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T> {
    pub weights: Array1<T>,
    pub intercept: T,
}

impl<T: Scalar> LinearModel<T> {
    fn from_centered(weights: Array1<T>, x_means: &Array1<T>, y_mean: T) -> Self {
        let intercept = y_mean - x_means.dot(&weights);
        LinearModel { weights, intercept }
    }

    /// Minimum-norm least squares.
    pub fn fit_least_squares(x: ArrayView2<'_, T>, y: &[T]) -> Self {
        let (xc, x_means) = center_columns(x);
        let (yc, y_mean) = center_vector(y);
        let w = min_norm_lstsq(xc.view(), yc.view());
        Self::from_centered(w, &x_means, y_mean)
    }

    /// Closed-form ridge: `(XᵀX + αI) w = Xᵀy` on centered data.
    pub fn fit_ridge(x: ArrayView2<'_, T>, y: &[T], alpha: T) -> Self {
        let (xc, x_means) = center_columns(x);
        let (yc, y_mean) = center_vector(y);
        let p = xc.ncols();
        let gram: Array2<T> = xc.t().dot(&xc) + &(Array2::<T>::eye(p) * alpha);
        let rhs = xc.t().dot(&yc);
        let w = cholesky_solve(&gram, &rhs).unwrap_or_else(|| min_norm_lstsq(xc.view(), yc.view()));
        Self::from_centered(w, &x_means, y_mean)
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<T> {
        rows.dot(&self.weights).iter().map(|&v| v + self.intercept).collect()
    }
}

/// Cyclic coordinate descent for
/// `(1 / 2n) ||y - Xw||² + α ||w||₁`, stopping when no coefficient moves by
/// more than `tol` in a sweep.
pub struct Lasso;

impl Lasso {
    pub fn fit<T: Scalar>(x: ArrayView2<'_, T>, y: &[T], alpha: T, max_iter: usize, tol: T) -> LinearModel<T> {
        let (xc, x_means) = center_columns(x);
        let (mut residual, y_mean) = center_vector(y);
        let (n, p) = xc.dim();
        let n_t = T::of_usize(n);
        let col_sq: Vec<T> = xc.columns().into_iter().map(|c| c.dot(&c)).collect();
        let mut w = Array1::<T>::zeros(p);
        let threshold = alpha * n_t;

        for _ in 0..max_iter {
            let mut max_change = T::zero();
            for j in 0..p {
                if col_sq[j] == T::zero() {
                    continue;
                }
                let col = xc.column(j);
                let old = w[j];
                let rho = col.dot(&residual) + col_sq[j] * old;
                let new = soft_threshold(rho, threshold) / col_sq[j];
                if new != old {
                    residual.scaled_add(old - new, &col);
                    w[j] = new;
                    max_change = max_change.max((new - old).abs());
                }
            }
            if max_change < tol {
                break;
            }
        }
        LinearModel::from_centered(w, &x_means, y_mean)
    }
}

fn soft_threshold<T: Scalar>(value: T, threshold: T) -> T {
    if value > threshold {
        value - threshold
    } else if value < -threshold {
        value + threshold
    } else {
        T::zero()
    }
}
