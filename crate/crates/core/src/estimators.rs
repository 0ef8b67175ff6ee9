//! Kernel smoothers over synthetic responses.
//!
//! At an evaluation point `x`, with `d_i = X_i - x` and `K_i = K(d_i / h)`,
//! the local moments are
//!
//! ```text
//! T_l = (1 / nh) * sum_i d_i^l K_i          l = 0, 1, 2
//! S_l = (1 / nh) * sum_i Z*_i d_i^l K_i     l = 0, 1
//! ```
//!
//! The local linear estimate is `(S_0 T_2 - S_1 T_1) / (T_0 T_2 - T_1^2)` and
//! the locally constant (Nadaraya–Watson) estimate is `S_0 / T_0`. Both use
//! the `0 / 0 := 0` rule, with the denominator treated as zero when
//! `|den| <= 1e-12 * max(scale, 1)`; `scale` is `T_0 T_2` for the local linear
//! fit and `T_0` for the locally constant one.
//!
//! [`llr_fit_direct`] evaluates the local linear fit through the literal
//! double sum over weights `w_ij = d_i (d_i - d_j) K_i K_j`. It costs O(n^2)
//! per point and exists as a cross-check for the O(n) moment path.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{Bandwidth, KernelSpec};
use crate::sampling::Dataset;
use crate::summation::CompensatedSum;
use crate::survival::SurvivalFunction;
use crate::transform::{synthetic_responses, SyntheticResponses};

/// Relative threshold below which a denominator counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Local linear fit on Kaplan–Meier synthetic responses.
    Llr,
    /// Local linear fit on synthetic responses built from the true survival.
    LlrPseudo,
    /// Locally constant kernel regression.
    Cr,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Llr => "llr",
            EstimatorKind::LlrPseudo => "llr_pseudo",
            EstimatorKind::Cr => "cr",
        }
    }

    pub fn is_local_linear(self) -> bool {
        !matches!(self, EstimatorKind::Cr)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "llr" => Ok(EstimatorKind::Llr),
            "llr_pseudo" => Ok(EstimatorKind::LlrPseudo),
            "cr" => Ok(EstimatorKind::Cr),
            other => Err(Error::UnknownEstimator(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalMoments {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub s0: f64,
    pub s1: f64,
}

impl LocalMoments {
    pub fn llr_numerator(&self) -> f64 {
        self.s0 * self.t2 - self.s1 * self.t1
    }

    pub fn llr_denominator(&self) -> f64 {
        self.t0 * self.t2 - self.t1 * self.t1
    }

    /// Local linear estimate and its degeneracy flag.
    pub fn llr_estimate(&self) -> (f64, bool) {
        ratio_or_zero(
            self.llr_numerator(),
            self.llr_denominator(),
            self.t0 * self.t2,
        )
    }

    /// Locally constant estimate and its degeneracy flag.
    pub fn cr_estimate(&self) -> (f64, bool) {
        ratio_or_zero(self.s0, self.t0, self.t0)
    }

    pub fn estimate(&self, kind: EstimatorKind) -> (f64, bool) {
        if kind.is_local_linear() {
            self.llr_estimate()
        } else {
            self.cr_estimate()
        }
    }
}

#[inline]
fn ratio_or_zero(numerator: f64, denominator: f64, scale: f64) -> (f64, bool) {
    if denominator.abs() <= DEGENERACY_TOLERANCE * scale.abs().max(1.0) {
        (0.0, true)
    } else {
        (numerator / denominator, false)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub eval_points: Vec<f64>,
    pub estimates: Vec<f64>,
    /// `true` where the `0 / 0 := 0` rule forced the estimate to 0.
    pub degenerate: Vec<bool>,
    pub bandwidth: Bandwidth,
    pub kind: EstimatorKind,
}

impl FitResult {
    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }
}

fn check_inputs(data: &Dataset, synth: &SyntheticResponses, eval_points: &[f64]) -> Result<()> {
    if synth.len() != data.len() {
        return Err(Error::LengthMismatch {
            expected: data.len(),
            found: synth.len(),
        });
    }
    if let Some(&bad) = eval_points.iter().find(|p| !p.is_finite()) {
        return Err(Error::NonFiniteEvalPoint(bad));
    }
    Ok(())
}

/// Moments at `x`, optionally leaving out record `skip`. Normalized by the
/// number of records actually used.
pub(crate) fn moments_excluding(
    data: &Dataset,
    synth: &[f64],
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
    skip: Option<usize>,
) -> LocalMoments {
    let h = h.value();
    let mut t0 = CompensatedSum::new();
    let mut t1 = CompensatedSum::new();
    let mut t2 = CompensatedSum::new();
    let mut s0 = CompensatedSum::new();
    let mut s1 = CompensatedSum::new();
    for (i, (r, &z)) in data.records().iter().zip(synth).enumerate() {
        if skip == Some(i) {
            continue;
        }
        let d = r.x - x;
        let w = kernel.evaluate(d / h);
        if w == 0.0 {
            continue;
        }
        let dw = d * w;
        t0.add(w);
        t1.add(dw);
        t2.add(d * dw);
        s0.add(z * w);
        s1.add(z * dw);
    }
    let used = data.len() - usize::from(skip.is_some_and(|s| s < data.len()));
    let norm = 1.0 / (used as f64 * h);
    LocalMoments {
        t0: t0.value() * norm,
        t1: t1.value() * norm,
        t2: t2.value() * norm,
        s0: s0.value() * norm,
        s1: s1.value() * norm,
    }
}

pub fn local_moments(
    data: &Dataset,
    synth: &SyntheticResponses,
    x: f64,
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<LocalMoments> {
    check_inputs(data, synth, std::slice::from_ref(&x))?;
    Ok(moments_excluding(data, synth.values(), x, h, kernel, None))
}

fn fit_with(
    eval_points: &[f64],
    h: Bandwidth,
    kind: EstimatorKind,
    point: impl Fn(f64) -> (f64, bool) + Sync,
) -> FitResult {
    let (estimates, degenerate) = eval_points.par_iter().map(|&x| point(x)).unzip();
    FitResult {
        eval_points: eval_points.to_vec(),
        estimates,
        degenerate,
        bandwidth: h,
        kind,
    }
}

/// Local linear fit through the moment factorization, O(n) per point.
pub fn llr_fit(
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: &[f64],
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<FitResult> {
    check_inputs(data, synth, eval_points)?;
    Ok(fit_with(eval_points, h, EstimatorKind::Llr, |x| {
        moments_excluding(data, synth.values(), x, h, kernel, None).llr_estimate()
    }))
}

/// Local linear fit by the literal double sum over `w_ij`, O(n^2) per point.
pub fn llr_fit_direct(
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: &[f64],
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<FitResult> {
    check_inputs(data, synth, eval_points)?;
    let z = synth.values();
    let n = data.len() as f64;
    let scale = (n * h.value()).powi(2);
    Ok(fit_with(eval_points, h, EstimatorKind::Llr, |x| {
        let terms: Vec<(f64, f64)> = data
            .records()
            .iter()
            .map(|r| {
                let d = r.x - x;
                (d, kernel.evaluate(d / h.value()))
            })
            .collect();
        let mut numerator = CompensatedSum::new();
        let mut denominator = CompensatedSum::new();
        let mut positive = CompensatedSum::new();
        for &(di, ki) in &terms {
            for (&(dj, kj), &zj) in terms.iter().zip(z) {
                let w = di * (di - dj) * ki * kj;
                numerator.add(w * zj);
                denominator.add(w);
                positive.add(di * di * ki * kj);
            }
        }
        ratio_or_zero(
            numerator.value() / scale,
            denominator.value() / scale,
            positive.value() / scale,
        )
    }))
}

/// Locally constant (Nadaraya–Watson) fit.
pub fn cr_fit(
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: &[f64],
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<FitResult> {
    check_inputs(data, synth, eval_points)?;
    Ok(fit_with(eval_points, h, EstimatorKind::Cr, |x| {
        moments_excluding(data, synth.values(), x, h, kernel, None).cr_estimate()
    }))
}

/// Local linear fit on synthetic responses built from a known censoring
/// survival function. Only meaningful in simulations.
pub fn llr_fit_pseudo<S: SurvivalFunction + ?Sized>(
    data: &Dataset,
    true_survival: &S,
    eval_points: &[f64],
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<FitResult> {
    let synth = synthetic_responses(data, true_survival);
    let mut fit = llr_fit(data, &synth, eval_points, h, kernel)?;
    fit.kind = EstimatorKind::LlrPseudo;
    Ok(fit)
}

/// Dispatches on `kind`. `LlrPseudo` smooths `synth` with the local linear
/// fit; the caller is responsible for having built it from the true survival.
pub fn fit(
    kind: EstimatorKind,
    data: &Dataset,
    synth: &SyntheticResponses,
    eval_points: &[f64],
    h: Bandwidth,
    kernel: KernelSpec,
) -> Result<FitResult> {
    let mut result = match kind {
        EstimatorKind::Cr => cr_fit(data, synth, eval_points, h, kernel)?,
        _ => llr_fit(data, synth, eval_points, h, kernel)?,
    };
    result.kind = kind;
    Ok(result)
}
