use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SeededRng};
use crate::scalar::Scalar;

/// Seeded synthetic dataset recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticSpec {
    /// Isotropic Gaussian clusters around centers drawn uniformly from
    /// `[-10, 10]^dims`. Rows cycle through the classes, so every class has
    /// exactly `per_class` rows.
    GaussianBlobs {
        classes: usize,
        per_class: usize,
        dims: usize,
        spread: f64,
        seed: u64,
    },
    /// `y = w·x + b + noise` with `x ~ N(0, I)`, `w_j, b ~ U(-2, 2)` and
    /// `noise ~ N(0, noise_std²)`. `w` and `b` are stored in the metadata.
    LinearRegression {
        n: usize,
        dims: usize,
        noise_std: f64,
        seed: u64,
    },
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("synthetic spec: {m}")));
        match *self {
            SyntheticSpec::GaussianBlobs {
                classes,
                per_class,
                dims,
                spread,
                ..
            } => {
                if classes < 2 {
                    return bad("classes must be at least 2");
                }
                if per_class == 0 || dims == 0 {
                    return bad("per_class and dims must be positive");
                }
                if !(spread.is_finite() && spread > 0.0) {
                    return bad("spread must be finite and positive");
                }
            }
            SyntheticSpec::LinearRegression { n, dims, noise_std, .. } => {
                if n == 0 || dims == 0 {
                    return bad("n and dims must be positive");
                }
                if !(noise_std.is_finite() && noise_std >= 0.0) {
                    return bad("noise_std must be finite and non-negative");
                }
            }
        }
        Ok(())
    }

    pub fn default_name(&self) -> &'static str {
        match self {
            SyntheticSpec::GaussianBlobs { .. } => "gaussian_blobs",
            SyntheticSpec::LinearRegression { .. } => "linear_regression",
        }
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

pub fn generate<T: Scalar>(spec: &SyntheticSpec) -> Result<Dataset<T>> {
    spec.validate()?;
    let names = |dims: usize| (0..dims).map(|j| format!("x{j}")).collect::<Vec<_>>();
    match *spec {
        SyntheticSpec::GaussianBlobs {
            classes,
            per_class,
            dims,
            spread,
            seed,
        } => {
            let mut centers_rng = SeededRng::new(derive_seed(seed, &[0]));
            let centers: Vec<Vec<f64>> = (0..classes)
                .map(|_| (0..dims).map(|_| centers_rng.uniform_in(-10.0, 10.0)).collect())
                .collect();
            let mut rng = SeededRng::new(derive_seed(seed, &[1]));
            let n = classes * per_class;
            let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
            let mut x = Array2::zeros((n, dims));
            for (i, &l) in labels.iter().enumerate() {
                for j in 0..dims {
                    x[[i, j]] = T::of(centers[l][j] + spread * rng.standard_normal());
                }
            }
            Ok(Dataset::classification(spec.default_name(), x, labels, classes, names(dims)))
        }
        SyntheticSpec::LinearRegression { n, dims, noise_std, seed } => {
            let mut coef_rng = SeededRng::new(derive_seed(seed, &[0]));
            let w: Vec<f64> = (0..dims).map(|_| coef_rng.uniform_in(-2.0, 2.0)).collect();
            let b = coef_rng.uniform_in(-2.0, 2.0);
            let mut rng = SeededRng::new(derive_seed(seed, &[1]));
            let mut x = Array2::zeros((n, dims));
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let mut t = b;
                for j in 0..dims {
                    let v = rng.standard_normal();
                    x[[i, j]] = T::of(v);
                    t += w[j] * v;
                }
                if noise_std > 0.0 {
                    t += noise_std * rng.standard_normal();
                }
                y.push(T::of(t));
            }
            Ok(Dataset::regression(spec.default_name(), x, y, names(dims))
                .with_metadata("w", join(&w))
                .with_metadata("b", join(&[b])))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TaskKind;

    fn blobs(seed: u64) -> SyntheticSpec {
        SyntheticSpec::GaussianBlobs {
            classes: 3,
            per_class: 50,
            dims: 4,
            spread: 1.0,
            seed,
        }
    }

    #[test]
    fn blobs_are_balanced() {
        let d: Dataset<f64> = generate(&blobs(1)).unwrap();
        assert_eq!(d.n_rows(), 150);
        assert_eq!(d.task(), TaskKind::Multiclass);
        let labels = d.target().as_labels().unwrap();
        for c in 0..3 {
            assert_eq!(labels.iter().filter(|&&l| l == c).count(), 50);
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a: Dataset<f64> = generate(&blobs(5)).unwrap();
        assert_eq!(a, generate(&blobs(5)).unwrap());
        assert_ne!(a.features(), generate::<f64>(&blobs(6)).unwrap().features());
    }

    #[test]
    fn noiseless_targets_follow_recorded_coefficients() {
        let spec = SyntheticSpec::LinearRegression {
            n: 30,
            dims: 3,
            noise_std: 0.0,
            seed: 9,
        };
        let d: Dataset<f64> = generate(&spec).unwrap();
        let w: Vec<f64> = d.metadata()["w"].split(',').map(|v| v.parse().unwrap()).collect();
        let b: f64 = d.metadata()["b"].parse().unwrap();
        let y = d.target().as_values().unwrap();
        for (i, row) in d.features().outer_iter().enumerate() {
            let t: f64 = b + row.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>();
            assert!((t - y[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SyntheticSpec::GaussianBlobs { classes: 1, per_class: 5, dims: 2, spread: 1.0, seed: 0 },
            SyntheticSpec::GaussianBlobs { classes: 2, per_class: 5, dims: 2, spread: f64::NAN, seed: 0 },
            SyntheticSpec::LinearRegression { n: 0, dims: 2, noise_std: 0.0, seed: 0 },
            SyntheticSpec::LinearRegression { n: 5, dims: 2, noise_std: -1.0, seed: 0 },
        ];
        for s in bad {
            assert!(generate::<f64>(&s).is_err(), "{s:?}");
        }
    }
}
