//! Censored observations and the simulated regression model.
//!
//! The simulation draws `X ~ N(0, 1)`, `Z = X + s * eps` with `eps ~ N(0, 1)`
//! and an independent censoring time `C ~ N(c, 1)`. Only `Y = min(Z, C)` and
//! `delta = 1{Z <= C}` reach the estimators.
//!
//! Random numbers come from ChaCha8 seeded through `seed_from_u64`; normal
//! variates use the ziggurat sampler of `rand_distr::StandardNormal`. Each
//! record consumes three normals in the fixed order `x`, `eps`, `c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedRecord {
    pub x: f64,
    /// Observed time `min(z, c)`.
    pub y: f64,
    /// `true` when the response is uncensored.
    pub delta: bool,
}

impl ObservedRecord {
    pub fn new(x: f64, y: f64, delta: bool) -> Self {
        Self { x, y, delta }
    }
}

/// A non-empty, finite collection of censored observations.
///
/// Record order is preserved; index `i` everywhere else refers to position
/// in this list.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<ObservedRecord>,
}

impl Dataset {
    pub fn new(records: Vec<ObservedRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (index, r) in records.iter().enumerate() {
            if !r.x.is_finite() {
                return Err(Error::NonFinite { index, field: "x" });
            }
            if !r.y.is_finite() {
                return Err(Error::NonFinite { index, field: "y" });
            }
        }
        Ok(Self { records })
    }

    /// Builds a dataset from parallel columns.
    pub fn from_columns(x: &[f64], y: &[f64], delta: &[bool]) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if delta.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: delta.len(),
            });
        }
        let records = x
            .iter()
            .zip(y)
            .zip(delta)
            .map(|((&x, &y), &d)| ObservedRecord::new(x, y, d))
            .collect();
        Self::new(records)
    }

    pub fn records(&self) -> &[ObservedRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Always `false`; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn xs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.x)
    }

    /// Fraction of records with `delta = false`.
    pub fn censored_fraction(&self) -> f64 {
        let censored = self.records.iter().filter(|r| !r.delta).count();
        censored as f64 / self.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub n: usize,
    pub noise_scale: f64,
    /// Location `c` of the normal censoring distribution.
    pub censor_location: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(n: usize, noise_scale: f64, censor_location: f64, seed: u64) -> Self {
        Self {
            n,
            noise_scale,
            censor_location,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSimulation("n must be at least 1".into()));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(Error::InvalidSimulation(format!(
                "noise_scale must be finite and non-negative, got {}",
                self.noise_scale
            )));
        }
        if !self.censor_location.is_finite() {
            return Err(Error::InvalidSimulation(format!(
                "censor_location must be finite, got {}",
                self.censor_location
            )));
        }
        Ok(())
    }
}

/// Simulated data together with the latent responses it was censored from.
///
/// `latent` is for scoring only and must never be passed to an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub data: Dataset,
    pub latent: Vec<f64>,
}

pub fn simulate(config: &SimulationConfig) -> Result<Simulated> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.n);
    let mut latent = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let x: f64 = rng.sample(StandardNormal);
        let eps: f64 = rng.sample(StandardNormal);
        let c = config.censor_location + rng.sample::<f64, _>(StandardNormal);
        let z = x + config.noise_scale * eps;
        let delta = z <= c;
        records.push(ObservedRecord::new(x, if delta { z } else { c }, delta));
        latent.push(z);
    }
    Ok(Simulated {
        data: Dataset::new(records)?,
        latent,
    })
}

/// Censoring location `c` giving `P(Z > C) = target_cp` under the simulated model.
///
/// `Z - C ~ N(-c, 2 + noise_scale^2)`, hence `c = -sqrt(2 + s^2) * Phi^-1(target_cp)`.
pub fn calibrate_censor_location(target_cp: f64, noise_scale: f64) -> Result<f64> {
    if !(target_cp > 0.0 && target_cp < 1.0) {
        return Err(Error::CensoringTarget(target_cp));
    }
    if !(noise_scale.is_finite() && noise_scale >= 0.0) {
        return Err(Error::InvalidSimulation(format!(
            "noise_scale must be finite and non-negative, got {noise_scale}"
        )));
    }
    let std_normal = Normal::standard();
    let spread = (2.0 + noise_scale * noise_scale).sqrt();
    Ok(-spread * std_normal.inverse_cdf(target_cp))
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of an independent stream: `base ^ splitmix64(stream)`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    base ^ splitmix64(stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(Dataset::new(vec![]), Err(Error::EmptyDataset));
        let bad = vec![ObservedRecord::new(0.0, f64::NAN, true)];
        assert_eq!(
            Dataset::new(bad),
            Err(Error::NonFinite {
                index: 0,
                field: "y"
            })
        );
    }

    #[test]
    fn noiseless_without_censoring_returns_covariate() {
        let sim = simulate(&SimulationConfig::new(500, 0.0, 1e6, 11)).unwrap();
        for r in sim.data.records() {
            assert!(r.delta);
            assert_eq!(r.y, r.x);
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let cfg = SimulationConfig::new(300, 0.2, 0.5, 99);
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
        let other = SimulationConfig { seed: 100, ..cfg };
        assert_ne!(simulate(&cfg).unwrap(), simulate(&other).unwrap());
    }

    #[test]
    fn observed_never_exceeds_latent() {
        let sim = simulate(&SimulationConfig::new(2000, 0.2, 0.3, 5)).unwrap();
        for (r, &z) in sim.data.records().iter().zip(&sim.latent) {
            assert!(r.y <= z);
            assert_eq!(r.y == z, r.delta);
        }
    }

    #[test]
    fn symmetric_location_censors_half() {
        let sim = simulate(&SimulationConfig::new(100_000, 0.2, 0.0, 2024)).unwrap();
        assert!((sim.data.censored_fraction() - 0.5).abs() < 0.01);
    }

    #[test]
    fn calibration_closed_form() {
        assert_eq!(calibrate_censor_location(0.5, 0.2).unwrap(), 0.0);
        assert_eq!(calibrate_censor_location(0.5, 3.0).unwrap(), 0.0);
        // -sqrt(2.04) * Phi^-1(p), quantiles -0.5244005127 and -1.2815515655
        let c30 = calibrate_censor_location(0.30, 0.2).unwrap();
        let c10 = calibrate_censor_location(0.10, 0.2).unwrap();
        assert!((c30 - 2.04f64.sqrt() * 0.524_400_512_7).abs() < 1e-8);
        assert!((c10 - 2.04f64.sqrt() * 1.281_551_565_5).abs() < 1e-8);
        assert!((c30 - 0.749).abs() < 5e-4);
        assert!((c10 - 1.830).abs() < 5e-4);
    }

    #[test]
    fn calibration_matches_monte_carlo_count() {
        for (target, seed) in [(0.30, 1u64), (0.10, 2)] {
            let c = calibrate_censor_location(target, 0.2).unwrap();
            let sim = simulate(&SimulationConfig::new(100_000, 0.2, c, seed)).unwrap();
            assert!((sim.data.censored_fraction() - target).abs() < 0.01);
        }
    }

    #[test]
    fn calibration_rejects_out_of_range() {
        for bad in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(calibrate_censor_location(bad, 0.2).is_err());
        }
    }

    #[test]
    fn derived_seeds_differ_per_stream() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
    }
}
