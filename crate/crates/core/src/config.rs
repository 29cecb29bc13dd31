use serde::{Deserialize, Serialize};

use crate::dataset::TaskKind;
use crate::error::{Error, Result};

/// Smallest fold at which the stopping rule can fire: stability counting
/// starts at the third fold and needs two increments.
pub const EARLIEST_STOP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreDirection {
    HigherIsBetter,
    LowerIsBetter,
}

impl ScoreDirection {
    pub fn for_task(task: TaskKind) -> Self {
        match task {
            TaskKind::Regression => ScoreDirection::LowerIsBetter,
            _ => ScoreDirection::HigherIsBetter,
        }
    }

    /// Whether `a` is a better score than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            ScoreDirection::HigherIsBetter => a > b,
            ScoreDirection::LowerIsBetter => a < b,
        }
    }
}

/// Parameters of the e-fold stopping rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EfoldConfig {
    /// Maximum number of folds; also the number of partitions.
    pub e_max: usize,
    /// Consecutive stable folds required before stopping.
    pub count_threshold: usize,
    /// Relative growth of the standard deviation that resets the counter.
    pub stability_tolerance: f64,
    pub score_direction: ScoreDirection,
}

impl Default for EfoldConfig {
    fn default() -> Self {
        EfoldConfig {
            e_max: 10,
            count_threshold: 2,
            stability_tolerance: 0.05,
            score_direction: ScoreDirection::HigherIsBetter,
        }
    }
}

impl EfoldConfig {
    /// Default rule with the score direction of `task`'s metric.
    pub fn for_task(task: TaskKind) -> Self {
        EfoldConfig {
            score_direction: ScoreDirection::for_task(task),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.e_max < EARLIEST_STOP {
            return Err(Error::InvalidConfig(format!(
                "e_max must be at least {EARLIEST_STOP}, got {}",
                self.e_max
            )));
        }
        if self.count_threshold < 1 {
            return Err(Error::InvalidConfig("count_threshold must be at least 1".into()));
        }
        if !(self.stability_tolerance > 0.0 && self.stability_tolerance < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "stability_tolerance must lie in (0, 1), got {}",
                self.stability_tolerance
            )));
        }
        Ok(())
    }
}
