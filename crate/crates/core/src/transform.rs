//! Synthetic responses `delta * y / G(y)`.
//!
//! With the true censoring survival these have the same conditional mean as
//! the latent response; with the Kaplan–Meier estimate they are the feasible
//! version used by every estimator.

use crate::sampling::Dataset;
use crate::survival::SurvivalFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticResponses {
    values: Vec<f64>,
    observed: Vec<f64>,
    weights: Vec<f64>,
    degenerate_count: usize,
}

impl SyntheticResponses {
    /// Wraps an arbitrary, fully observed response vector (unit weights).
    pub fn from_values(values: Vec<f64>) -> Self {
        let weights = vec![1.0; values.len()];
        Self {
            observed: values.clone(),
            values,
            weights,
            degenerate_count: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observed responses: `y` for uncensored records, 0 otherwise.
    pub fn observed(&self) -> &[f64] {
        &self.observed
    }

    /// Inverse-probability-of-censoring weights `delta / G(y)`, so that
    /// `values[i] = weights[i] * observed[i]` up to rounding. Degenerate
    /// records get 0.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Uncensored records whose survival divisor was 0 (value imputed as 0).
    pub fn degenerate_count(&self) -> usize {
        self.degenerate_count
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn synthetic_responses<S: SurvivalFunction + ?Sized>(
    data: &Dataset,
    survival: &S,
) -> SyntheticResponses {
    let n = data.len();
    let mut values = Vec::with_capacity(n);
    let mut observed = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut degenerate_count = 0;
    for r in data.records() {
        if !r.delta {
            values.push(0.0);
            observed.push(0.0);
            weights.push(0.0);
            continue;
        }
        observed.push(r.y);
        let g = survival.survival_at(r.y);
        if g > 0.0 {
            values.push(r.y / g);
            weights.push(1.0 / g);
        } else {
            degenerate_count += 1;
            values.push(0.0);
            weights.push(0.0);
        }
    }
    SyntheticResponses {
        values,
        observed,
        weights,
        degenerate_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::ObservedRecord;
    use crate::survival::{km_censoring_survival, NoCensoring};

    #[test]
    fn censored_records_are_zero() {
        let data = Dataset::new(vec![
            ObservedRecord::new(0.0, 1.5, false),
            ObservedRecord::new(0.0, 3.5, true),
        ])
        .unwrap();
        let s = synthetic_responses(&data, &NoCensoring);
        assert_eq!(s.values(), &[0.0, 3.5]);
        assert_eq!(s.degenerate_count(), 0);
    }

    #[test]
    fn four_point_example_with_its_own_km() {
        let data = Dataset::new(vec![
            ObservedRecord::new(0.0, 1.0, true),
            ObservedRecord::new(0.0, 2.0, false),
            ObservedRecord::new(0.0, 3.0, true),
            ObservedRecord::new(0.0, 4.0, false),
        ])
        .unwrap();
        let km = km_censoring_survival(&data).unwrap();
        let s = synthetic_responses(&data, &km);
        assert_eq!(s.values()[0], 1.0);
        assert_eq!(s.values()[1], 0.0);
        assert!((s.values()[2] - 4.5).abs() < 1e-15);
        assert!((s.weights()[2] - 1.5).abs() < 1e-15);
        assert_eq!(s.weights()[1], 0.0);
        assert_eq!(s.values()[3], 0.0);
        assert_eq!(s.degenerate_count(), 0);
    }

    #[test]
    fn uncensored_largest_observation_is_imputed_and_counted() {
        let data = Dataset::new(vec![
            ObservedRecord::new(0.0, 1.0, true),
            ObservedRecord::new(0.0, 2.0, true),
        ])
        .unwrap();
        let km = km_censoring_survival(&data).unwrap();
        let s = synthetic_responses(&data, &km);
        assert_eq!(s.values(), &[1.0, 0.0]);
        assert_eq!(s.weights(), &[1.0, 0.0]);
        assert_eq!(s.observed(), &[1.0, 2.0]);
        assert_eq!(s.degenerate_count(), 1);
    }
}
