//! Leave-one-out cross-validated bandwidth selection.
//!
//! Synthetic responses are computed once on the full sample and held fixed;
//! only the smoother is refit with each record left out.
//!
//! Two losses are available. [`CvLoss::Synthetic`] scores the leave-one-out
//! prediction against the synthetic response itself. Because neighbouring
//! uncensored records share almost the same `y / G(y)`, that score keeps
//! falling as `h` shrinks towards nearest-neighbour interpolation and
//! systematically undersmooths. [`CvLoss::Ipcw`] (the default) scores
//! uncensored records only, as `delta_i / G(y_i) * (y_i - prediction)^2`,
//! which estimates the prediction error against the latent response. On fully
//! observed responses with unit weights the two coincide.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{moments_excluding, EstimatorKind};
use crate::kernels::{Bandwidth, KernelSpec};
use crate::sampling::Dataset;
use crate::summation::{self, CompensatedSum};
use crate::transform::SyntheticResponses;

/// Scores within `1e-12 * max(best, 1)` of the best are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Default number of candidates in the data-driven grid.
pub const DEFAULT_GRID_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    candidates: Vec<f64>,
}

impl BandwidthGrid {
    pub fn new(candidates: Vec<f64>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidBandwidthGrid("grid is empty".into()));
        }
        if let Some(bad) = candidates.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidBandwidthGrid(format!(
                "candidate {bad} is not positive"
            )));
        }
        if candidates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBandwidthGrid(
                "candidates must be strictly increasing".into(),
            ));
        }
        Ok(Self { candidates })
    }

    /// `count` logarithmically spaced values from `lo` to `hi` inclusive.
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidBandwidthGrid(
                "count must be at least 1".into(),
            ));
        }
        if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidBandwidthGrid(format!(
                "bad range [{lo}, {hi}]"
            )));
        }
        if count == 1 || lo == hi {
            return Self::new(vec![lo]);
        }
        let (a, b) = (lo.ln(), hi.ln());
        let step = (b - a) / (count - 1) as f64;
        let mut candidates: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
        candidates[0] = lo;
        candidates[count - 1] = hi;
        Self::new(candidates)
    }

    /// `count` log-spaced candidates on `[0.1 * sd * n^(-1/5), 2 * sd]`, with
    /// `sd` the sample standard deviation of the covariate.
    pub fn default_for(data: &Dataset, count: usize) -> Result<Self> {
        let n = data.len();
        if n < 2 {
            return Err(Error::TooFewRecords(n));
        }
        let xs: Vec<f64> = data.xs().collect();
        let mean = summation::mean(&xs).unwrap_or(0.0);
        let ss = summation::sum(xs.iter().map(|x| (x - mean).powi(2)));
        let sd = (ss / (n - 1) as f64).sqrt();
        if sd.is_nan() || sd <= 0.0 {
            return Err(Error::InvalidBandwidthGrid(
                "covariate has zero spread".into(),
            ));
        }
        let lo = 0.1 * sd * (n as f64).powf(-0.2);
        Self::log_spaced(lo, 2.0 * sd, count)
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CvLoss {
    /// `(1/n) sum_i (Z*_i - prediction_i)^2`
    Synthetic,
    /// `(1/n) sum_i w_i (y_i - prediction_i)^2` with `w_i = delta_i / G(y_i)`
    #[default]
    Ipcw,
}

impl CvLoss {
    pub fn name(self) -> &'static str {
        match self {
            CvLoss::Synthetic => "synthetic",
            CvLoss::Ipcw => "ipcw",
        }
    }
}

impl std::fmt::Display for CvLoss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CvLoss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "synthetic" => Ok(CvLoss::Synthetic),
            "ipcw" => Ok(CvLoss::Ipcw),
            other => Err(Error::UnknownCvLoss(other.to_string())),
        }
    }
}

/// Mean leave-one-out prediction loss at bandwidth `h`.
///
/// Degenerate leave-one-out fits predict 0.
pub fn cv_score(
    data: &Dataset,
    synth: &SyntheticResponses,
    h: Bandwidth,
    kernel: KernelSpec,
    kind: EstimatorKind,
    loss: CvLoss,
) -> Result<f64> {
    let n = data.len();
    if n < 2 {
        return Err(Error::TooFewRecords(n));
    }
    if synth.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: synth.len(),
        });
    }
    let z = synth.values();
    let mut acc = CompensatedSum::new();
    for (i, r) in data.records().iter().enumerate() {
        let (target, weight) = match loss {
            CvLoss::Synthetic => (z[i], 1.0),
            CvLoss::Ipcw => (synth.observed()[i], synth.weights()[i]),
        };
        if weight == 0.0 {
            continue;
        }
        let (prediction, _) = moments_excluding(data, z, r.x, h, kernel, Some(i)).estimate(kind);
        acc.add(weight * (target - prediction).powi(2));
    }
    Ok(acc.value() / n as f64)
}

/// Cross-validation score for every candidate, in grid order.
pub fn cv_profile(
    data: &Dataset,
    synth: &SyntheticResponses,
    grid: &BandwidthGrid,
    kernel: KernelSpec,
    kind: EstimatorKind,
    loss: CvLoss,
) -> Result<Vec<f64>> {
    grid.candidates()
        .par_iter()
        .map(|&h| cv_score(data, synth, Bandwidth::new(h)?, kernel, kind, loss))
        .collect()
}

/// Index of the minimum score; ties go to the earliest (smallest) candidate.
pub fn argmin_with_ties(scores: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &s) in scores.iter().enumerate() {
        match best {
            None => best = Some((i, s)),
            Some((_, b)) if s < b - TIE_TOLERANCE * b.max(1.0) => best = Some((i, s)),
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}

pub fn select_bandwidth(
    data: &Dataset,
    synth: &SyntheticResponses,
    grid: &BandwidthGrid,
    kernel: KernelSpec,
    kind: EstimatorKind,
    loss: CvLoss,
) -> Result<Bandwidth> {
    let scores = cv_profile(data, synth, grid, kernel, kind, loss)?;
    let best = argmin_with_ties(&scores).expect("grid is non-empty");
    Bandwidth::new(grid.candidates()[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::ObservedRecord;

    fn uncensored(xs: &[f64], ys: &[f64]) -> (Dataset, SyntheticResponses) {
        let data = Dataset::new(
            xs.iter()
                .zip(ys)
                .map(|(&x, &y)| ObservedRecord::new(x, y, true))
                .collect(),
        )
        .unwrap();
        (data, SyntheticResponses::from_values(ys.to_vec()))
    }

    #[test]
    fn grid_validation() {
        assert!(BandwidthGrid::new(vec![]).is_err());
        assert!(BandwidthGrid::new(vec![0.1, 0.1]).is_err());
        assert!(BandwidthGrid::new(vec![0.0, 0.1]).is_err());
        let g = BandwidthGrid::log_spaced(0.05, 1.0, 20).unwrap();
        assert_eq!(g.candidates().len(), 20);
        assert_eq!(g.candidates()[0], 0.05);
        assert_eq!(g.candidates()[19], 1.0);
        let ratio = g.candidates()[1] / g.candidates()[0];
        assert!((g.candidates()[10] / g.candidates()[9] - ratio).abs() < 1e-12);
    }

    #[test]
    fn default_grid_brackets_rule() {
        let xs = [-1.0, 0.0, 1.0, 2.0];
        let (data, _) = uncensored(&xs, &xs);
        let sd = (5.0f64 / 3.0).sqrt();
        let g = BandwidthGrid::default_for(&data, 20).unwrap();
        assert!((g.candidates()[0] - 0.1 * sd * 4f64.powf(-0.2)).abs() < 1e-15);
        assert!((g.candidates()[19] - 2.0 * sd).abs() < 1e-15);

        let (flat, _) = uncensored(&[1.0, 1.0], &[0.0, 0.0]);
        assert!(BandwidthGrid::default_for(&flat, 20).is_err());
    }

    #[test]
    fn needs_two_records() {
        let (data, synth) = uncensored(&[0.0], &[1.0]);
        let h = Bandwidth::new(1.0).unwrap();
        assert_eq!(
            cv_score(
                &data,
                &synth,
                h,
                KernelSpec::Gaussian,
                EstimatorKind::Llr,
                CvLoss::Ipcw
            ),
            Err(Error::TooFewRecords(1))
        );
    }

    #[test]
    fn affine_responses_score_zero() {
        let xs: Vec<f64> = (0..25).map(|i| i as f64 * 0.2 - 2.4).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + 0.5 * x).collect();
        let (data, synth) = uncensored(&xs, &ys);
        let h = Bandwidth::new(1.0).unwrap();
        for loss in [CvLoss::Synthetic, CvLoss::Ipcw] {
            let s = cv_score(
                &data,
                &synth,
                h,
                KernelSpec::Gaussian,
                EstimatorKind::Llr,
                loss,
            )
            .unwrap();
            assert!(s <= 1e-12, "{s}");
        }
    }

    #[test]
    fn three_point_hand_example() {
        // Epanechnikov, h = 1.5, X = (0, 1, 2), Z = (1, 3, 2).
        // Leaving 0 out: neighbours 1 (K(2/3) = 5/12) and 2 (K(4/3) = 0), one
        // point -> degenerate LLR, prediction 0. Leaving 2 out: same, 0.
        // Leaving 1 out: neighbours 0 and 2 at distance 1 each, K = 0.75 * (1 - 4/9),
        // symmetric -> LLR line through (0, 1), (2, 2), value 1.5 at x = 1.
        // LLR score = (1 + 2.25 + 4) / 3; CR (local constant): leaving 0 out
        // predicts 3, leaving 2 out predicts 3, leaving 1 out predicts 1.5.
        let (data, synth) = uncensored(&[0.0, 1.0, 2.0], &[1.0, 3.0, 2.0]);
        let h = Bandwidth::new(1.5).unwrap();
        let k = KernelSpec::Epanechnikov;
        for loss in [CvLoss::Synthetic, CvLoss::Ipcw] {
            let llr = cv_score(&data, &synth, h, k, EstimatorKind::Llr, loss).unwrap();
            assert!((llr - 7.25 / 3.0).abs() < 1e-10, "{llr}");
            let cr = cv_score(&data, &synth, h, k, EstimatorKind::Cr, loss).unwrap();
            assert!((cr - (4.0 + 2.25 + 1.0) / 3.0).abs() < 1e-10, "{cr}");
        }
    }

    #[test]
    fn ipcw_loss_skips_censored_and_weights_uncensored() {
        use crate::survival::km_censoring_survival;
        use crate::transform::synthetic_responses;
        // sorted y: 1 (T), 2 (F), 3 (T), 4 (T); G = 2/3 on [2, 4), 0 from 4
        let data = Dataset::new(vec![
            ObservedRecord::new(0.0, 1.0, true),
            ObservedRecord::new(1.0, 2.0, false),
            ObservedRecord::new(2.0, 3.0, true),
            ObservedRecord::new(3.0, 4.0, true),
        ])
        .unwrap();
        let km = km_censoring_survival(&data).unwrap();
        let synth = synthetic_responses(&data, &km);
        // Epanechnikov with h = 0.5: every leave-one-out fit is empty -> predicts 0
        let h = Bandwidth::new(0.5).unwrap();
        let k = KernelSpec::Epanechnikov;
        let ipcw = cv_score(&data, &synth, h, k, EstimatorKind::Cr, CvLoss::Ipcw).unwrap();
        // record 0: 1 * 1^2, record 2: 1.5 * 3^2, record 3: weight 0
        assert!((ipcw - (1.0 + 13.5) / 4.0).abs() < 1e-14, "{ipcw}");
        let plain = cv_score(&data, &synth, h, k, EstimatorKind::Cr, CvLoss::Synthetic).unwrap();
        assert!(
            (plain - (1.0 + 4.5f64.powi(2)) / 4.0).abs() < 1e-14,
            "{plain}"
        );
    }

    #[test]
    fn loss_names() {
        assert_eq!("IPCW".parse::<CvLoss>().unwrap(), CvLoss::Ipcw);
        assert_eq!("synthetic".parse::<CvLoss>().unwrap(), CvLoss::Synthetic);
        assert!("mse".parse::<CvLoss>().is_err());
        assert_eq!(CvLoss::default(), CvLoss::Ipcw);
    }

    #[test]
    fn tie_rule_prefers_smallest() {
        assert_eq!(argmin_with_ties(&[1.0, 1.0, 1.0]), Some(0));
        assert_eq!(argmin_with_ties(&[2.0, 1.0, 1.0 - 1e-14]), Some(1));
        assert_eq!(argmin_with_ties(&[2.0, 1.0, 0.5]), Some(2));
        assert_eq!(argmin_with_ties(&[]), None);
    }

    #[test]
    fn constant_scores_select_smallest_candidate() {
        // constant responses: every nondegenerate fit is exact
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys = vec![2.0; 20];
        let (data, synth) = uncensored(&xs, &ys);
        let grid = BandwidthGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
        let k = KernelSpec::Gaussian;
        let h = select_bandwidth(&data, &synth, &grid, k, EstimatorKind::Cr, CvLoss::Ipcw).unwrap();
        assert_eq!(h.value(), 0.5);

        let single = BandwidthGrid::new(vec![0.7]).unwrap();
        let h = select_bandwidth(
            &data,
            &synth,
            &single,
            k,
            EstimatorKind::Llr,
            CvLoss::Synthetic,
        )
        .unwrap();
        assert_eq!(h.value(), 0.7);
    }
}
