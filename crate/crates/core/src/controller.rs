//! The e-fold stopping rule as an incremental state machine.
//!
//! After each fold score is observed the sample standard deviation `σ_e` of
//! all scores so far is recomputed. From the third fold on, the stability
//! counter is incremented when `σ_e < σ_{e-1}`, reset to zero when
//! `|σ_e - σ_{e-1}| > tolerance * σ_{e-1}`, and incremented otherwise. Once the
//! counter reaches the threshold before the last fold, evaluation stops and
//! the running mean of the observed scores is the estimate.
//!
//! Both comparisons are strict, so equal deviations (including the all-zero
//! case of a constant trace) and a change of exactly `tolerance` count as
//! stable.

use std::fmt;

use crate::config::EfoldConfig;
use crate::error::{Error, Result};
use crate::metrics::{running_mean, sample_std};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopStatus {
    Continue,
    StoppedEarly,
    ExhaustedFolds,
}

impl StopStatus {
    pub fn is_terminal(self) -> bool {
        self != StopStatus::Continue
    }
}

impl fmt::Display for StopStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopStatus::Continue => "continue",
            StopStatus::StoppedEarly => "stopped_early",
            StopStatus::ExhaustedFolds => "exhausted_folds",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopDecision<T> {
    pub status: StopStatus,
    /// Number of folds observed when the decision was made.
    pub stop_fold: usize,
    /// Mean of the observed fold scores.
    pub final_mean: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingState<T> {
    scores: Vec<T>,
    sigma_curr: Option<T>,
    sigma_prev: Option<T>,
    count: usize,
    config: EfoldConfig,
    status: StopStatus,
}

impl<T: Scalar> StoppingState<T> {
    pub fn new(config: EfoldConfig) -> Result<Self> {
        config.validate()?;
        Ok(StoppingState {
            scores: Vec::with_capacity(config.e_max),
            sigma_curr: None,
            sigma_prev: None,
            count: 0,
            config,
            status: StopStatus::Continue,
        })
    }

    pub fn config(&self) -> &EfoldConfig {
        &self.config
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    /// Folds observed so far.
    pub fn e(&self) -> usize {
        self.scores.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sigma(&self) -> Option<T> {
        self.sigma_curr
    }

    pub fn previous_sigma(&self) -> Option<T> {
        self.sigma_prev
    }

    pub fn status(&self) -> StopStatus {
        self.status
    }

    /// Running mean of the observed scores, if any.
    pub fn mean(&self) -> Option<T> {
        running_mean(&self.scores).ok()
    }

    /// Feeds the next fold score and returns the decision after it.
    pub fn observe(&mut self, score: T) -> Result<StopDecision<T>> {
        if self.status.is_terminal() {
            return Err(Error::AlreadyStopped);
        }
        if !score.is_finite() {
            return Err(Error::NonFinite("fold score"));
        }
        self.scores.push(score);
        let e = self.scores.len();

        if e > 1 {
            self.sigma_prev = self.sigma_curr;
            self.sigma_curr = Some(sample_std(&self.scores)?);
        }
        if let (true, Some(curr), Some(prev)) = (e > 2, self.sigma_curr, self.sigma_prev) {
            let tolerance = T::of(self.config.stability_tolerance);
            if curr < prev {
                self.count += 1;
            } else if (curr - prev).abs() > tolerance * prev {
                self.count = 0;
            } else {
                self.count += 1;
            }
        }

        self.status = if e >= self.config.e_max {
            StopStatus::ExhaustedFolds
        } else if self.count == self.config.count_threshold {
            StopStatus::StoppedEarly
        } else {
            StopStatus::Continue
        };
        Ok(StopDecision {
            status: self.status,
            stop_fold: e,
            final_mean: running_mean(&self.scores)?,
        })
    }
}

/// Replays a full trace of `e_max` precomputed fold scores through the rule.
///
/// Scores after the stop point are never read.
pub fn run_sequence<T: Scalar>(config: EfoldConfig, scores: &[T]) -> Result<StopDecision<T>> {
    if scores.len() != config.e_max {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: config.e_max,
        });
    }
    let mut state = StoppingState::new(config)?;
    for &s in scores {
        let decision = state.observe(s)?;
        if decision.status.is_terminal() {
            return Ok(decision);
        }
    }
    unreachable!("the controller always terminates by e_max")
}
