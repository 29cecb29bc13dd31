use std::collections::VecDeque;

use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use super::argmax;
use super::linalg::cholesky_solve;
use crate::scalar::Scalar;

/// Multinomial logistic regression.
///
/// Minimizes `mean log-loss + ||W||² / (2·c·n)` (intercepts unpenalized).
/// The search runs on standardized features `z = (x - μ) / s`, with the
/// penalty rescaled so the objective is unchanged, and the solution is
/// mapped back to the raw features. With unscaled inputs the penalty barely
/// touches large-scale features, which leaves the problem badly conditioned,
/// so small problems use damped Newton steps and larger ones fall back to
/// L-BFGS.
#[derive(Debug, Clone)]
pub struct LogisticRegression<T> {
    weights: Array2<T>,
    intercepts: Array1<T>,
    iterations: usize,
}

/// Largest parameter count solved with an explicit Hessian.
const NEWTON_MAX_DIM: usize = 300;
const MEMORY: usize = 10;

struct Objective<T> {
    /// Standardized features with a trailing column of ones.
    a: Array2<T>,
    onehot: Array2<T>,
    /// Penalty on each standardized weight row, `λ / s_j²`; 0 for the intercept row.
    penalty: Array1<T>,
}

impl<T: Scalar> Objective<T> {
    fn classes(&self) -> usize {
        self.onehot.ncols()
    }

    fn params<'t>(&self, theta: &'t [T]) -> ArrayView2<'t, T> {
        // theta[j·C + k] is the coefficient of column j for class k
        ArrayView2::from_shape((self.a.ncols(), self.classes()), theta).expect("theta length")
    }

    /// Class probabilities per row and the summed log-loss.
    fn probabilities(&self, theta: &[T]) -> (Array2<T>, T) {
        let mut probs = self.a.dot(&self.params(theta));
        let mut loss = T::zero();
        for (mut row, target) in probs.rows_mut().into_iter().zip(self.onehot.rows()) {
            let max = row.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
            row.mapv_inplace(|x| x - max);
            let log_total = row.iter().map(|&x| x.exp()).sum::<T>().ln();
            for (l, &t) in row.iter_mut().zip(target.iter()) {
                if t > T::zero() {
                    loss = loss + log_total - *l;
                }
                *l = (*l - log_total).exp();
            }
        }
        (probs, loss)
    }

    /// Objective value and its gradient, flattened like `theta`.
    fn value_grad(&self, theta: &[T]) -> (T, Vec<T>) {
        let (probs, loss) = self.probabilities(theta);
        let n = T::of_usize(self.a.nrows());
        let v = self.params(theta);
        let pen = self.penalty.view().insert_axis(Axis(1));
        let grad = self.a.t().dot(&(probs - &self.onehot)) / n + &(&v * &pen);
        let reg = (&v * &v * pen).sum() / T::of(2.0);
        (loss / n + reg, grad.iter().copied().collect())
    }

    fn hessian(&self, theta: &[T]) -> Array2<T> {
        let (probs, _) = self.probabilities(theta);
        let n = T::of_usize(self.a.nrows());
        let (q, c) = (self.a.ncols(), self.classes());
        let mut h = Array2::<T>::zeros((q * c, q * c));
        for k in 0..c {
            for l in k..c {
                let w: Array1<T> = probs
                    .rows()
                    .into_iter()
                    .map(|p| p[k] * (if k == l { T::one() } else { T::zero() } - p[l]) / n)
                    .collect();
                let block = self.a.t().dot(&(&self.a * &w.view().insert_axis(Axis(1))));
                for i in 0..q {
                    for j in 0..q {
                        h[[i * c + k, j * c + l]] = block[[i, j]];
                        h[[j * c + l, i * c + k]] = block[[i, j]];
                    }
                }
            }
        }
        for j in 0..q {
            for k in 0..c {
                h[[j * c + k, j * c + k]] = h[[j * c + k, j * c + k]] + self.penalty[j];
            }
        }
        h
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &g| m.max(g.abs()))
}

/// Armijo backtracking along `d` from `theta`.
fn line_search<T: Scalar>(
    obj: &Objective<T>,
    theta: &[T],
    value: T,
    slope: T,
    d: &[T],
    mut step: T,
) -> Option<(Vec<T>, T, Vec<T>)> {
    for _ in 0..60 {
        let trial: Vec<T> = theta.iter().zip(d).map(|(&t, &di)| t + step * di).collect();
        let (v, g) = obj.value_grad(&trial);
        if v.is_finite() && v <= value + T::of(1e-4) * step * slope {
            return Some((trial, v, g));
        }
        step = step * T::of(0.5);
    }
    None
}

/// Newton direction, with `μI` added until the Cholesky factorization
/// succeeds. The softmax intercepts make the Hessian singular along one
/// direction, so some damping is usually needed.
fn newton_direction<T: Scalar>(h: &Array2<T>, grad: &[T]) -> Option<Vec<T>> {
    let rhs: Array1<T> = grad.iter().map(|&g| -g).collect();
    let scale = h.diag().iter().fold(T::zero(), |m, &x| m.max(x)).max(T::min_positive_value());
    let mut mu = scale * T::epsilon().sqrt();
    for _ in 0..20 {
        let mut damped = h.clone();
        damped.diag_mut().mapv_inplace(|x| x + mu);
        if let Some(d) = cholesky_solve(&damped, &rhs) {
            if d.iter().all(|x| x.is_finite()) {
                return Some(d.to_vec());
            }
        }
        mu = mu * T::of(10.0);
    }
    None
}

fn newton<T: Scalar>(obj: &Objective<T>, theta: &mut Vec<T>, max_iter: usize, tol: T) -> usize {
    let (mut value, mut grad) = obj.value_grad(theta);
    let mut iterations = 0;
    while iterations < max_iter && max_abs(&grad) >= tol {
        iterations += 1;
        let mut d = newton_direction(&obj.hessian(theta), &grad).unwrap_or_else(|| grad.iter().map(|&g| -g).collect());
        let mut slope = dot(&grad, &d);
        if slope >= T::zero() || slope.is_nan() {
            d = grad.iter().map(|&g| -g).collect();
            slope = -dot(&grad, &grad);
        }
        let Some((next, v, g)) = line_search(obj, theta, value, slope, &d, T::one()) else {
            break;
        };
        let stalled = value - v <= T::epsilon() * value.abs();
        *theta = next;
        value = v;
        grad = g;
        if stalled {
            break;
        }
    }
    iterations
}

/// Two-loop recursion: `-H·g` from the stored `(s, y, 1 / yᵀs)` pairs.
fn lbfgs_direction<T: Scalar>(g: &[T], memory: &VecDeque<(Vec<T>, Vec<T>, T)>) -> Vec<T> {
    let mut q: Vec<T> = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = *rho * dot(s, &q);
        for (qi, &yi) in q.iter_mut().zip(y) {
            *qi = *qi - a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v = *v * gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let beta = *rho * dot(y, &q);
        for (qi, &si) in q.iter_mut().zip(s) {
            *qi = *qi + (a - beta) * si;
        }
    }
    q.into_iter().map(|v| -v).collect()
}

fn lbfgs<T: Scalar>(obj: &Objective<T>, theta: &mut Vec<T>, max_iter: usize, tol: T) -> usize {
    let (mut value, mut grad) = obj.value_grad(theta);
    let mut memory: VecDeque<(Vec<T>, Vec<T>, T)> = VecDeque::with_capacity(MEMORY);
    let mut iterations = 0;
    while iterations < max_iter && max_abs(&grad) >= tol {
        iterations += 1;
        let mut d = lbfgs_direction(&grad, &memory);
        let mut slope = dot(&grad, &d);
        if slope >= T::zero() || slope.is_nan() {
            memory.clear();
            d = grad.iter().map(|&g| -g).collect();
            slope = -dot(&grad, &grad);
        }
        let step = if memory.is_empty() {
            T::one() / dot(&grad, &grad).sqrt().max(T::one())
        } else {
            T::one()
        };
        let Some((next, v, g)) = line_search(obj, theta, value, slope, &d, step) else {
            break;
        };
        let s: Vec<T> = next.iter().zip(theta.iter()).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = g.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::epsilon() * dot(&y, &y) {
            if memory.len() == MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, T::one() / sy));
        }
        let stalled = value - v <= T::epsilon() * value.abs();
        *theta = next;
        value = v;
        grad = g;
        if stalled {
            break;
        }
    }
    iterations
}

impl<T: Scalar> LogisticRegression<T> {
    /// Stops when the largest gradient entry (standardized coordinates) is
    /// below `tol`, after `max_iter` iterations, or when no step decreases
    /// the objective.
    pub fn fit(x: ArrayView2<'_, T>, labels: &[usize], classes: usize, c: T, max_iter: usize, tol: T) -> Self {
        let (n, p) = x.dim();
        let nt = T::of_usize(n);
        let mut onehot = Array2::<T>::zeros((n, classes));
        for (i, &l) in labels.iter().enumerate() {
            onehot[[i, l]] = T::one();
        }
        let mean = x.sum_axis(Axis(0)) / nt;
        let scale: Array1<T> = x
            .axis_iter(Axis(1))
            .zip(mean.iter())
            .map(|(col, &m)| {
                let var = col.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / nt;
                if var > T::zero() {
                    var.sqrt()
                } else {
                    T::one()
                }
            })
            .collect();
        let mut a = Array2::<T>::ones((n, p + 1));
        a.slice_mut(s![.., ..p])
            .assign(&((&x - &mean.view().insert_axis(Axis(0))) / scale.view().insert_axis(Axis(0))));
        let lambda = T::one() / (c * nt);
        let mut penalty: Array1<T> = scale.mapv(|s| lambda / (s * s)).into_iter().collect();
        penalty.append(Axis(0), ndarray::aview1(&[T::zero()])).expect("1-d append");
        let objective = Objective { a, onehot, penalty };

        let mut theta = vec![T::zero(); (p + 1) * classes];
        let iterations = if theta.len() <= NEWTON_MAX_DIM {
            newton(&objective, &mut theta, max_iter, tol)
        } else {
            lbfgs(&objective, &mut theta, max_iter, tol)
        };

        // back to raw features: W = V / s, b = b' - μ·W
        let params = objective.params(&theta);
        let weights = &params.slice(s![..p, ..]) / &scale.view().insert_axis(Axis(1));
        let intercepts = &params.row(p) - &mean.dot(&weights);
        LogisticRegression {
            weights,
            intercepts,
            iterations,
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn predict(&self, rows: ArrayView2<'_, T>) -> Vec<usize> {
        let logits = rows.dot(&self.weights) + self.intercepts.view().insert_axis(Axis(0));
        logits
            .rows()
            .into_iter()
            .map(|r| argmax(r.as_slice().expect("standard layout")))
            .collect()
    }
}
