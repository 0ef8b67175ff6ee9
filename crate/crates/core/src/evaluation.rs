//! Error metrics and the seeded Monte Carlo comparison of the smoothers.
//!
//! A study is a matrix of cells (censoring target x sample size). Each
//! replication of a cell simulates a dataset, builds Kaplan–Meier synthetic
//! responses, selects a bandwidth by cross-validation independently for
//! each estimator, fits on the evaluation grid and scores the fit against the
//! true regression line `mu(x) = x`.
//!
//! Replication `r` of cell `k` draws from seed
//! `base_seed ^ splitmix64((k << 32) | r)`. Work units run in parallel but
//! results are collected in unit order and aggregated sequentially, so the
//! report does not depend on the thread count.

use rayon::prelude::*;

use crate::bandwidth::{select_bandwidth, BandwidthGrid, CvLoss};
use crate::error::{Error, Result};
use crate::estimators::{fit, EstimatorKind, FitResult};
use crate::kernels::KernelSpec;
use crate::sampling::{calibrate_censor_location, derive_seed, simulate, SimulationConfig};
use crate::summation::{self, CompensatedSum};
use crate::survival::km_censoring_survival;
use crate::transform::synthetic_responses;

/// Discretized compact evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    points: Vec<f64>,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidEvalGrid("grid is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidEvalGrid("points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidEvalGrid(
                "points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `count` equally spaced points from `lo` to `hi` inclusive.
    pub fn equispaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(Error::InvalidEvalGrid("count must be at least 1".into())),
            1 => Self::new(vec![lo]),
            _ => {
                let step = (hi - lo) / (count - 1) as f64;
                let mut points: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
                points[count - 1] = hi;
                Self::new(points)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices of the outermost `fraction` of the grid, split evenly between
    /// both ends (at least one point per end).
    pub fn edge_indices(&self, fraction: f64) -> Vec<usize> {
        let n = self.points.len();
        let per_side = ((fraction * n as f64 / 2.0).round() as usize).max(1);
        if 2 * per_side >= n {
            return (0..n).collect();
        }
        (0..per_side).chain(n - per_side..n).collect()
    }
}

impl Default for EvalGrid {
    /// 101 points on `[-2, 2]`.
    fn default() -> Self {
        Self::equispaced(-2.0, 2.0, 101).expect("static grid")
    }
}

fn check_aligned(fit: &FitResult, truth: &[f64]) -> Result<()> {
    if fit.estimates.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: fit.estimates.len(),
            found: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidEvalGrid("no points to score".into()));
    }
    Ok(())
}

/// Mean squared deviation from `truth` over the evaluation points.
pub fn mse(fit: &FitResult, truth: &[f64]) -> Result<f64> {
    check_aligned(fit, truth)?;
    let ss = summation::sum(
        fit.estimates
            .iter()
            .zip(truth)
            .map(|(e, t)| (e - t).powi(2)),
    );
    Ok(ss / truth.len() as f64)
}

/// Largest absolute deviation from `truth` over the evaluation points.
pub fn sup_error(fit: &FitResult, truth: &[f64]) -> Result<f64> {
    check_aligned(fit, truth)?;
    Ok(fit
        .estimates
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max))
}

/// Where cross-validation candidates come from.
#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthPlan {
    /// [`BandwidthGrid::default_for`] on each simulated dataset.
    DataDriven {
        count: usize,
    },
    Fixed(BandwidthGrid),
}

impl Default for BandwidthPlan {
    fn default() -> Self {
        BandwidthPlan::DataDriven {
            count: crate::bandwidth::DEFAULT_GRID_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub sample_sizes: Vec<usize>,
    /// Target censoring proportions, each in `(0, 1)`.
    pub censoring_targets: Vec<f64>,
    pub replications: usize,
    pub kernel: KernelSpec,
    pub grid: EvalGrid,
    pub bandwidth: BandwidthPlan,
    pub cv_loss: CvLoss,
    pub base_seed: u64,
    pub noise_scale: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            sample_sizes: vec![100, 300, 500],
            censoring_targets: vec![0.10, 0.30, 0.50],
            replications: 100,
            kernel: KernelSpec::Gaussian,
            grid: EvalGrid::default(),
            bandwidth: BandwidthPlan::default(),
            cv_loss: CvLoss::default(),
            base_seed: 20_240_101,
            noise_scale: 0.2,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidStudy("sample_sizes is empty".into()));
        }
        if self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidStudy(
                "every sample size must be at least 2".into(),
            ));
        }
        if self.censoring_targets.is_empty() {
            return Err(Error::InvalidStudy("censoring_targets is empty".into()));
        }
        if let Some(&bad) = self
            .censoring_targets
            .iter()
            .find(|&&p| !(p > 0.0 && p < 1.0))
        {
            return Err(Error::CensoringTarget(bad));
        }
        if self.replications == 0 {
            return Err(Error::InvalidStudy(
                "replications must be at least 1".into(),
            ));
        }
        if let BandwidthPlan::DataDriven { count: 0 } = self.bandwidth {
            return Err(Error::InvalidStudy(
                "bandwidth grid count must be at least 1".into(),
            ));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::InvalidStudy(format!(
                "bad noise_scale {}",
                self.noise_scale
            )));
        }
        Ok(())
    }

    /// Cells in report order: censoring target major, sample size minor.
    pub fn cells(&self) -> Result<Vec<StudyCell>> {
        let mut cells = Vec::new();
        for &target_cp in &self.censoring_targets {
            let censor_location = calibrate_censor_location(target_cp, self.noise_scale)?;
            for &n in &self.sample_sizes {
                cells.push(StudyCell {
                    index: cells.len(),
                    target_cp,
                    n,
                    censor_location,
                });
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyCell {
    pub index: usize,
    pub target_cp: f64,
    pub n: usize,
    pub censor_location: f64,
}

/// Seed of replication `replication` in cell `cell_index`.
pub fn replication_seed(base_seed: u64, cell_index: usize, replication: usize) -> u64 {
    derive_seed(base_seed, ((cell_index as u64) << 32) | replication as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub target_cp: f64,
    pub n: usize,
    pub replication: usize,
    pub seed: u64,
    pub censor_location: f64,
    pub observed_cp: f64,
    pub estimator: EstimatorKind,
    pub bandwidth: f64,
    pub mse: f64,
    pub sup_error: f64,
    /// Mean absolute error over the outermost 10% of the grid.
    pub edge_abs_error: f64,
    /// Grid points where the fit was forced to 0.
    pub degenerate_points: usize,
    /// Uncensored records whose Kaplan–Meier divisor was 0.
    pub synthetic_degenerate: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseRow {
    pub target_cp: f64,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub mean_mse: f64,
    pub sd_mse: f64,
    pub mean_bandwidth: f64,
    pub mean_observed_cp: f64,
    /// Fraction of grid evaluations flagged degenerate.
    pub degenerate_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub rows: Vec<MseRow>,
}

impl MseReport {
    pub fn row(&self, target_cp: f64, n: usize, estimator: EstimatorKind) -> Option<&MseRow> {
        self.rows
            .iter()
            .find(|r| r.target_cp == target_cp && r.n == n && r.estimator == estimator)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub report: MseReport,
    pub replications: Vec<ReplicationRecord>,
}

const EDGE_FRACTION: f64 = 0.10;

fn run_replication(
    config: &StudyConfig,
    cell: &StudyCell,
    replication: usize,
    estimators: &[EstimatorKind],
) -> Result<Vec<ReplicationRecord>> {
    let seed = replication_seed(config.base_seed, cell.index, replication);
    let sim = simulate(&SimulationConfig::new(
        cell.n,
        config.noise_scale,
        cell.censor_location,
        seed,
    ))?;
    let km = km_censoring_survival(&sim.data)?;
    let synth = synthetic_responses(&sim.data, &km);
    let grid = match &config.bandwidth {
        BandwidthPlan::DataDriven { count } => BandwidthGrid::default_for(&sim.data, *count)?,
        BandwidthPlan::Fixed(grid) => grid.clone(),
    };
    let points = config.grid.points();
    let truth = points;
    let edges = config.grid.edge_indices(EDGE_FRACTION);
    let observed_cp = sim.data.censored_fraction();

    estimators
        .iter()
        .map(|&kind| {
            let h = select_bandwidth(
                &sim.data,
                &synth,
                &grid,
                config.kernel,
                kind,
                config.cv_loss,
            )?;
            let result = fit(kind, &sim.data, &synth, points, h, config.kernel)?;
            let edge_abs_error = summation::sum(
                edges
                    .iter()
                    .map(|&i| (result.estimates[i] - truth[i]).abs()),
            ) / edges.len() as f64;
            Ok(ReplicationRecord {
                target_cp: cell.target_cp,
                n: cell.n,
                replication,
                seed,
                censor_location: cell.censor_location,
                observed_cp,
                estimator: kind,
                bandwidth: h.value(),
                mse: mse(&result, truth)?,
                sup_error: sup_error(&result, truth)?,
                edge_abs_error,
                degenerate_points: result.degenerate_count(),
                synthetic_degenerate: synth.degenerate_count(),
            })
        })
        .collect()
}

fn run_records(
    config: &StudyConfig,
    estimators: &[EstimatorKind],
) -> Result<Vec<ReplicationRecord>> {
    config.validate()?;
    let cells = config.cells()?;
    let units: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.replications).map(move |r| (c, r)))
        .collect();
    let per_unit: Vec<Vec<ReplicationRecord>> = units
        .par_iter()
        .map(|&(c, r)| run_replication(config, &cells[c], r, estimators))
        .collect::<Result<_>>()?;
    Ok(per_unit.into_iter().flatten().collect())
}

fn aggregate(config: &StudyConfig, records: &[ReplicationRecord]) -> Result<MseReport> {
    let grid_len = config.grid.len() as f64;
    let mut rows = Vec::new();
    for cell in config.cells()? {
        for kind in [EstimatorKind::Llr, EstimatorKind::Cr] {
            let group: Vec<&ReplicationRecord> = records
                .iter()
                .filter(|r| r.target_cp == cell.target_cp && r.n == cell.n && r.estimator == kind)
                .collect();
            if group.is_empty() {
                continue;
            }
            let count = group.len() as f64;
            let mean_of = |f: fn(&ReplicationRecord) -> f64| {
                summation::sum(group.iter().map(|r| f(r))) / count
            };
            let mean_mse = mean_of(|r| r.mse);
            let sd_mse = if group.len() > 1 {
                let ss: CompensatedSum = group.iter().map(|r| (r.mse - mean_mse).powi(2)).collect();
                (ss.value() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            rows.push(MseRow {
                target_cp: cell.target_cp,
                n: cell.n,
                estimator: kind,
                mean_mse,
                sd_mse,
                mean_bandwidth: mean_of(|r| r.bandwidth),
                mean_observed_cp: mean_of(|r| r.observed_cp),
                degenerate_rate: mean_of(|r| r.degenerate_points as f64) / grid_len,
            });
        }
    }
    Ok(MseReport { rows })
}

pub fn run_study(config: &StudyConfig) -> Result<StudyOutput> {
    let replications = run_records(config, &[EstimatorKind::Llr, EstimatorKind::Cr])?;
    let report = aggregate(config, &replications)?;
    Ok(StudyOutput {
        report,
        replications,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub median_sup_error: f64,
    pub median_bandwidth: f64,
    /// `sqrt(ln n / (n h)) + h` at the median selected bandwidth.
    pub reference_rate: f64,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    })
}

/// Median sup-norm error of the local linear fit for each sample size, next
/// to the reference rate `sqrt(ln n / (n h)) + h`.
///
/// `config` must name exactly one censoring target.
pub fn rate_diagnostic(config: &StudyConfig) -> Result<Vec<RateRow>> {
    if config.censoring_targets.len() != 1 {
        return Err(Error::InvalidStudy(
            "rate diagnostic needs exactly one censoring target".into(),
        ));
    }
    let records = run_records(config, &[EstimatorKind::Llr])?;
    Ok(config
        .sample_sizes
        .iter()
        .map(|&n| {
            let group: Vec<&ReplicationRecord> = records.iter().filter(|r| r.n == n).collect();
            let sups: Vec<f64> = group.iter().map(|r| r.sup_error).collect();
            let hs: Vec<f64> = group.iter().map(|r| r.bandwidth).collect();
            let h = median(&hs).unwrap_or(f64::NAN);
            let nf = n as f64;
            RateRow {
                n,
                median_sup_error: median(&sups).unwrap_or(f64::NAN),
                median_bandwidth: h,
                reference_rate: (nf.ln() / (nf * h)).sqrt() + h,
            }
        })
        .collect())
}
