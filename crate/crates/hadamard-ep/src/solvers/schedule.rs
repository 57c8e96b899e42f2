//! Parameter schedules with per-role validation.
//!
//! The same `Schedule` description can serve three roles with different
//! admissibility rules: regularization weights lambda_k must stay in
//! (theta, lambda_bar]; perturbation budgets e_k must be nonnegative with a
//! certified finite sum; averaging weights alpha_k must lie in (0,1), tend
//! to zero and have a divergent sum. Role wrappers check what can be
//! checked structurally and, for the lambda role, verify the bound over the
//! run horizon.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("lambda schedule leaves (theta, lambda_bar] at k = {k}: value {value}, theta {theta}, lambda_bar {lambda_bar}")]
    LambdaOutOfRange { k: usize, value: f64, theta: f64, lambda_bar: f64 },
    #[error("error schedule is not certifiably summable: {0}")]
    NotSummable(String),
    #[error("error schedule has a negative value at k = {k}")]
    NegativeError { k: usize },
    #[error("alpha schedule must be harmonic: it needs values in (0,1), a vanishing limit and a divergent sum, which {0} does not certify")]
    AlphaNotCertified(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant { value: f64 },
    /// init * ratio^k
    Geometric { init: f64, ratio: f64 },
    /// 1 / (k + 1)
    Harmonic,
    Custom { values: Vec<f64> },
}

impl Schedule {
    fn kind_name(&self) -> &'static str {
        match self {
            Schedule::Constant { .. } => "constant",
            Schedule::Geometric { .. } => "geometric",
            Schedule::Harmonic => "harmonic",
            Schedule::Custom { .. } => "custom",
        }
    }

    /// Raw value at index k; `extension` fills past the end of a custom list.
    fn raw(&self, k: usize, extension: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Geometric { init, ratio } => init * ratio.powi(k as i32),
            Schedule::Harmonic => 1.0 / (k as f64 + 1.0),
            Schedule::Custom { values } => match values.get(k) {
                Some(v) => *v,
                None => {
                    if extension.is_nan() {
                        *values.last().expect("custom schedules are nonempty")
                    } else {
                        extension
                    }
                }
            },
        }
    }
}

/// Regularization weights, verified to stay in (theta, lambda_bar] over the
/// run horizon. Custom lists extend by their last value.
#[derive(Debug, Clone)]
pub struct LambdaSchedule {
    schedule: Schedule,
}

impl LambdaSchedule {
    pub fn validate(
        schedule: &Schedule,
        theta: f64,
        lambda_bar: f64,
        horizon: usize,
    ) -> Result<Self, ScheduleError> {
        if let Schedule::Custom { values } = schedule {
            if values.is_empty() {
                return Err(ScheduleError::LambdaOutOfRange {
                    k: 0,
                    value: f64::NAN,
                    theta,
                    lambda_bar,
                });
            }
        }
        let out = LambdaSchedule { schedule: schedule.clone() };
        for k in 0..horizon.max(1) {
            let v = out.value(k);
            if !(v > theta && v <= lambda_bar) {
                return Err(ScheduleError::LambdaOutOfRange { k, value: v, theta, lambda_bar });
            }
        }
        Ok(out)
    }

    pub fn value(&self, k: usize) -> f64 {
        self.schedule.raw(k, f64::NAN)
    }
}

/// Perturbation budgets, nonnegative with a certified finite sum:
/// constant zero, geometric with ratio < 1, or a finite custom list
/// (zero beyond its end).
#[derive(Debug, Clone)]
pub struct ErrorSchedule {
    schedule: Schedule,
}

impl ErrorSchedule {
    pub fn validate(schedule: &Schedule) -> Result<Self, ScheduleError> {
        match schedule {
            Schedule::Constant { value } => {
                if *value < 0.0 {
                    return Err(ScheduleError::NegativeError { k: 0 });
                }
                if *value > 0.0 {
                    return Err(ScheduleError::NotSummable(
                        "a positive constant has an infinite sum".into(),
                    ));
                }
            }
            Schedule::Geometric { init, ratio } => {
                if *init < 0.0 {
                    return Err(ScheduleError::NegativeError { k: 0 });
                }
                if !(*ratio >= 0.0 && *ratio < 1.0) {
                    return Err(ScheduleError::NotSummable(format!(
                        "geometric ratio {ratio} is not in [0, 1)"
                    )));
                }
            }
            Schedule::Harmonic => {
                return Err(ScheduleError::NotSummable("the harmonic series diverges".into()))
            }
            Schedule::Custom { values } => {
                if let Some(k) = values.iter().position(|v| *v < 0.0) {
                    return Err(ScheduleError::NegativeError { k });
                }
            }
        }
        Ok(ErrorSchedule { schedule: schedule.clone() })
    }

    pub fn value(&self, k: usize) -> f64 {
        self.schedule.raw(k, 0.0)
    }

    /// Certified bound on the total perturbation budget.
    pub fn total(&self) -> f64 {
        match &self.schedule {
            Schedule::Constant { .. } => 0.0,
            Schedule::Geometric { init, ratio } => init / (1.0 - ratio),
            Schedule::Harmonic => unreachable!("rejected at validation"),
            Schedule::Custom { values } => values.iter().sum(),
        }
    }
}

/// Halpern averaging weights. Only the harmonic schedule certifies all
/// three requirements structurally, so only it is accepted.
#[derive(Debug, Clone)]
pub struct AlphaSchedule {
    schedule: Schedule,
}

impl AlphaSchedule {
    pub fn validate(schedule: &Schedule) -> Result<Self, ScheduleError> {
        match schedule {
            Schedule::Harmonic => Ok(AlphaSchedule { schedule: schedule.clone() }),
            other => Err(ScheduleError::AlphaNotCertified(other.kind_name())),
        }
    }

    /// alpha at the 1-based iterate index (so the first weight is 1/2).
    pub fn value(&self, k: usize) -> f64 {
        self.schedule.raw(k, f64::NAN)
    }
}
