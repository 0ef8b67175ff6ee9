//! Censoring survival functions.
//!
//! [`km_censoring_survival`] builds the Kaplan–Meier estimate of
//! `P(C > t)` as a right-continuous [`StepSurvival`]. Known survival functions
//! used in simulations implement the same [`SurvivalFunction`] trait so the
//! synthetic-data transform can run against either.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::sampling::Dataset;

pub trait SurvivalFunction: Sync {
    /// `P(C > t)`.
    fn survival_at(&self, t: f64) -> f64;
}

/// Right-continuous, non-increasing step function with value 1 before the
/// first jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSurvival {
    jump_times: Vec<f64>,
    values: Vec<f64>,
    vanishes_at_last: bool,
}

impl StepSurvival {
    /// `values[k]` holds on `[jump_times[k], jump_times[k + 1])`.
    pub fn from_steps(jump_times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jump_times.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: jump_times.len(),
                found: values.len(),
            });
        }
        if jump_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidStepFunction(
                "jump times must be finite".into(),
            ));
        }
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction(
                "jump times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidStepFunction(
                "values must lie in [0, 1]".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidStepFunction(
                "values must be non-increasing".into(),
            ));
        }
        let vanishes_at_last = values.last() == Some(&0.0);
        Ok(Self {
            jump_times,
            values,
            vanishes_at_last,
        })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&s| s <= t);
        if idx == 0 {
            1.0
        } else {
            self.values[idx - 1]
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whether the function drops to 0 at its last jump (the Kaplan–Meier
    /// terminal rule at the largest observation).
    pub fn vanishes_at_last(&self) -> bool {
        self.vanishes_at_last
    }
}

impl SurvivalFunction for StepSurvival {
    fn survival_at(&self, t: f64) -> f64 {
        self.evaluate(t)
    }
}

/// Kaplan–Meier estimate of the censoring survival function.
///
/// Order statistics `Y(1) <= ... <= Y(n)` carry their `delta`; at tied times
/// uncensored records sort first. The estimate is the product of
/// `1 - (1 - delta(i)) / (n - i + 1)` over `Y(i) <= t` for `t < Y(n)`, and
/// exactly 0 for `t >= Y(n)`. Tied censored times collapse into one jump.
pub fn km_censoring_survival(data: &Dataset) -> Result<StepSurvival> {
    let records = data.records();
    let n = records.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        ra.y.total_cmp(&rb.y).then(rb.delta.cmp(&ra.delta))
    });

    let mut jump_times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut product = 1.0;
    for (rank, &idx) in order.iter().enumerate() {
        let r = &records[idx];
        if r.delta {
            continue;
        }
        let at_risk = (n - rank) as f64;
        product *= 1.0 - 1.0 / at_risk;
        match jump_times.last() {
            Some(&t) if t == r.y => *values.last_mut().unwrap() = product,
            _ => {
                jump_times.push(r.y);
                values.push(product);
            }
        }
    }

    let y_max = records[order[n - 1]].y;
    match jump_times.last() {
        Some(&t) if t == y_max => *values.last_mut().unwrap() = 0.0,
        _ => {
            jump_times.push(y_max);
            values.push(0.0);
        }
    }
    Ok(StepSurvival {
        jump_times,
        values,
        vanishes_at_last: true,
    })
}

/// Survival of `C ~ N(location, scale^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalCensoringSurvival {
    dist: Normal,
}

impl NormalCensoringSurvival {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        Normal::new(location, scale)
            .map(|dist| Self { dist })
            .map_err(|e| Error::InvalidSimulation(e.to_string()))
    }

    /// Unit-scale censoring used by the simulation model.
    pub fn unit(location: f64) -> Result<Self> {
        Self::new(location, 1.0)
    }
}

impl SurvivalFunction for NormalCensoringSurvival {
    fn survival_at(&self, t: f64) -> f64 {
        self.dist.sf(t)
    }
}

/// `P(C > t) = 1` everywhere: no censoring mechanism.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoCensoring;

impl SurvivalFunction for NoCensoring {
    fn survival_at(&self, _t: f64) -> f64 {
        1.0
    }
}
