use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::stable_mean;
use crate::scalar::Scalar;

/// Column means and the column-centered copy of `x`.
pub(crate) fn center_columns<T: Scalar>(x: ArrayView2<'_, T>) -> (Array2<T>, Array1<T>) {
    let means: Array1<T> = x
        .axis_iter(Axis(1))
        .map(|col| stable_mean(col.iter().copied()))
        .collect();
    let centered = &x - &means.view().insert_axis(Axis(0));
    (centered, means)
}

pub(crate) fn center_vector<T: Scalar>(y: &[T]) -> (Array1<T>, T) {
    let mean = stable_mean(y.iter().copied());
    (y.iter().map(|&v| v - mean).collect(), mean)
}

/// Minimum-norm least-squares solution of `a w ≈ b`.
///
/// Uses one-sided Jacobi SVD: column pairs of a working copy of `a` are
/// rotated until mutually orthogonal, with the rotations accumulated in `V`.
/// The rotated columns are then `u_i σ_i`, so
/// `w = Σ (a_i·b / σ_i²) v_i` over singular values above the rank cutoff
/// `max(n, p) · ε · σ_max`. Rank-deficient inputs therefore never fail.
pub(crate) fn min_norm_lstsq<T: Scalar>(a: ArrayView2<'_, T>, b: ArrayView1<'_, T>) -> Array1<T> {
    let (n, p) = a.dim();
    let mut work = a.to_owned();
    let mut v = Array2::<T>::eye(p);
    let eps = T::epsilon();

    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let (alpha, beta, gamma) = {
                    let ci = work.column(i);
                    let cj = work.column(j);
                    (ci.dot(&ci), cj.dot(&cj), ci.dot(&cj))
                };
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut work, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sq_norms: Vec<T> = work.axis_iter(Axis(1)).map(|c| c.dot(&c)).collect();
    let sigma_max = sq_norms.iter().fold(T::zero(), |m, &s| m.max(s)).sqrt();
    let cutoff = T::of_usize(n.max(p)) * eps * sigma_max;
    let mut w = Array1::<T>::zeros(p);
    for (i, &sq) in sq_norms.iter().enumerate() {
        if sq.sqrt() <= cutoff || sq == T::zero() {
            continue;
        }
        let coef = work.column(i).dot(&b) / sq;
        w.scaled_add(coef, &v.column(i));
    }
    w
}

fn rotate_columns<T: Scalar>(m: &mut Array2<T>, i: usize, j: usize, c: T, s: T) {
    for mut row in m.rows_mut() {
        let xi = row[i];
        let xj = row[j];
        row[i] = c * xi - s * xj;
        row[j] = s * xi + c * xj;
    }
}

/// Solves `m x = rhs` for symmetric positive definite `m` by Cholesky.
///
/// Returns `None` when `m` is not numerically positive definite.
pub(crate) fn cholesky_solve<T: Scalar>(m: &Array2<T>, rhs: &Array1<T>) -> Option<Array1<T>> {
    let p = m.nrows();
    let mut l = Array2::<T>::zeros((p, p));
    for i in 0..p {
        for j in 0..=i {
            let mut sum = m[[i, j]];
            for k in 0..j {
                sum = sum - l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= T::zero() || sum.is_nan() {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    // forward: L z = rhs
    let mut z = Array1::<T>::zeros(p);
    for i in 0..p {
        let mut sum = rhs[i];
        for k in 0..i {
            sum = sum - l[[i, k]] * z[k];
        }
        z[i] = sum / l[[i, i]];
    }
    // backward: Lᵀ x = z
    let mut x = Array1::<T>::zeros(p);
    for i in (0..p).rev() {
        let mut sum = z[i];
        for k in (i + 1)..p {
            sum = sum - l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn full_rank_matches_normal_equations() {
        let a = array![[1.0, 2.0], [3.0, 4.0], [5.0, 7.0], [1.0, -1.0]];
        let b = array![1.0, 2.0, 4.0, 0.5];
        let w = min_norm_lstsq(a.view(), b.view());
        let ata = a.t().dot(&a);
        let atb = a.t().dot(&b);
        let w2 = cholesky_solve(&ata, &atb).unwrap();
        for (x, y) in w.iter().zip(w2.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn duplicate_column_gives_minimum_norm() {
        // Columns identical: any split of the weight fits; min-norm splits evenly.
        let a = array![[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]];
        let b = array![2.0, 4.0, 6.0];
        let w = min_norm_lstsq(a.view(), b.view());
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let a = Array2::<f64>::zeros((3, 2));
        let w = min_norm_lstsq(a.view(), array![1.0, 2.0, 3.0].view());
        assert_eq!(w, array![0.0, 0.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky_solve(&m, &array![1.0, 1.0]).is_none());
    }

    #[test]
    fn centering() {
        let x = array![[1.0, 10.0], [3.0, 20.0]];
        let (c, m) = center_columns(x.view());
        assert_eq!(m, array![2.0, 15.0]);
        assert_eq!(c, array![[-1.0, -5.0], [1.0, 5.0]]);
    }
}
