//! Shared test oracles.
#![allow(dead_code)]

use censored_llr::prelude::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Literal product-form Kaplan–Meier estimate of the censoring survival at `t`.
///
/// Re-sorts on every call and multiplies factor by factor; ties put
/// uncensored records first.
pub fn brute_force_km(rows: &[(f64, bool)], t: f64) -> f64 {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1)));
    let n = sorted.len();
    if t >= sorted[n - 1].0 {
        return 0.0;
    }
    let mut product = 1.0;
    for (i, &(y, delta)) in sorted.iter().enumerate() {
        let one_based = i + 1;
        if y <= t {
            let censored = if delta { 0.0 } else { 1.0 };
            product *= 1.0 - censored / (n - one_based + 1) as f64;
        }
    }
    product
}

pub fn to_dataset(rows: &[(f64, bool)]) -> Dataset {
    Dataset::new(
        rows.iter()
            .map(|&(y, d)| ObservedRecord::new(y * 0.5, y, d))
            .collect(),
    )
    .unwrap()
}

/// Datasets of 1..=12 records (half of them on an integer lattice to force
/// ties) with 100 query points.
pub fn small_censored_dataset() -> impl Strategy<Value = (Vec<(f64, bool)>, Vec<f64>)> {
    let y = prop_oneof![(0i32..6).prop_map(f64::from), -5.0f64..5.0];
    (
        prop::collection::vec((y, any::<bool>()), 1..=12),
        prop::collection::vec(-7.0f64..7.0, 100),
    )
}

pub fn check_km_properties(
    rows: &[(f64, bool)],
    queries: &[f64],
) -> std::result::Result<(), TestCaseError> {
    let km = km_censoring_survival(&to_dataset(rows)).unwrap();
    let y_max = rows.iter().map(|r| r.0).fold(f64::MIN, f64::max);
    let y_min = rows.iter().map(|r| r.0).fold(f64::MAX, f64::min);

    let mut points: Vec<f64> = queries.to_vec();
    points.extend(rows.iter().map(|r| r.0));
    points.sort_by(f64::total_cmp);

    let mut previous = 1.0;
    for &t in &points {
        let v = km.evaluate(t);
        prop_assert!((0.0..=1.0).contains(&v), "out of range {v} at {t}");
        prop_assert!(v <= previous, "increase at {t}: {previous} -> {v}");
        previous = v;
        let oracle = brute_force_km(rows, t);
        prop_assert!((v - oracle).abs() <= 1e-12, "t={t}: {v} vs oracle {oracle}");
        if t < y_min {
            prop_assert_eq!(v, 1.0);
        }
    }

    for &jump in km.jump_times() {
        let at_censored = rows.iter().any(|&(y, d)| !d && y == jump);
        prop_assert!(
            at_censored || jump == y_max,
            "jump at {jump} is not a censored time"
        );
    }
    if rows.iter().all(|r| r.1) {
        for &t in &points {
            let expected = if t < y_max { 1.0 } else { 0.0 };
            prop_assert_eq!(km.evaluate(t), expected);
        }
    }
    Ok(())
}
