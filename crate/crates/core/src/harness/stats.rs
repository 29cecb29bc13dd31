use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::metrics::{running_mean, sample_std};
use crate::scalar::Scalar;

/// How the ground-truth confidence interval is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CiOptions {
    pub level: f64,
    /// `mean ± t·s/√k` when true, `mean ± t·s` when false.
    pub standard_error: bool,
}

impl Default for CiOptions {
    fn default() -> Self {
        CiOptions {
            level: 0.95,
            standard_error: true,
        }
    }
}

/// Two-sided Student t critical value for `level` with `dof` degrees of freedom.
pub fn t_critical(level: f64, dof: usize) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("confidence level {level} outside (0, 1)")));
    }
    let dist = StudentsT::new(0.0, 1.0, dof as f64)
        .map_err(|e| Error::InvalidConfig(format!("t distribution with {dof} dof: {e}")))?;
    Ok(dist.inverse_cdf((1.0 + level) / 2.0))
}

/// t-interval around the mean of `scores`.
pub fn confidence_interval<T: Scalar>(scores: &[T], options: CiOptions) -> Result<(T, T)> {
    if scores.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: scores.len(),
        });
    }
    let k = scores.len();
    let mean = running_mean(scores)?;
    let sd = sample_std(scores)?;
    let t = T::of(t_critical(options.level, k - 1)?);
    let spread = if options.standard_error {
        sd / T::of_usize(k).sqrt()
    } else {
        sd
    };
    let half = t * spread;
    Ok((mean - half, mean + half))
}

/// `|m_e - m_full| / |m_full| · 100`; the ground truth is the normalizer.
pub fn pct_difference<T: Scalar>(m_e: T, m_full: T) -> Result<T> {
    if m_full == T::zero() {
        return Err(Error::ZeroReference);
    }
    Ok((m_e - m_full).abs() / m_full.abs() * T::of(100.0))
}
