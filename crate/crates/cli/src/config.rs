//! Study configuration files and run manifests.
//!
//! A config is TOML with top-level study fields and optional `[grid]` and
//! `[bandwidth]` sections. Unknown keys are rejected. Omitted fields take the
//! library defaults.

use std::time::{SystemTime, UNIX_EPOCH};

use censored_llr::evaluation::{replication_seed, StudyConfig};
use censored_llr::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            min: -2.0,
            max: 2.0,
            points: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum BandwidthSection {
    /// Cross-validation over the data-driven log-spaced grid.
    Cv {
        #[serde(default = "default_grid_count")]
        count: usize,
    },
    /// Cross-validation over an explicit candidate list (a single value fixes h).
    Fixed { values: Vec<f64> },
}

fn default_grid_count() -> usize {
    censored_llr::bandwidth::DEFAULT_GRID_SIZE
}

impl Default for BandwidthSection {
    fn default() -> Self {
        BandwidthSection::Cv {
            count: default_grid_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyFile {
    pub sample_sizes: Vec<usize>,
    pub censoring_targets: Vec<f64>,
    pub replications: usize,
    pub kernel: String,
    pub cv_loss: String,
    pub base_seed: u64,
    pub noise_scale: f64,
    pub grid: GridSection,
    pub bandwidth: BandwidthSection,
}

impl Default for StudyFile {
    fn default() -> Self {
        let d = StudyConfig::default();
        Self {
            sample_sizes: d.sample_sizes,
            censoring_targets: d.censoring_targets,
            replications: d.replications,
            kernel: d.kernel.name().to_string(),
            cv_loss: d.cv_loss.name().to_string(),
            base_seed: d.base_seed,
            noise_scale: d.noise_scale,
            grid: GridSection::default(),
            bandwidth: BandwidthSection::default(),
        }
    }
}

impl StudyFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_study_config(&self) -> Result<StudyConfig> {
        let bandwidth = match &self.bandwidth {
            BandwidthSection::Cv { count } => BandwidthPlan::DataDriven { count: *count },
            BandwidthSection::Fixed { values } => {
                BandwidthPlan::Fixed(BandwidthGrid::new(values.clone())?)
            }
        };
        let config = StudyConfig {
            sample_sizes: self.sample_sizes.clone(),
            censoring_targets: self.censoring_targets.clone(),
            replications: self.replications,
            kernel: self.kernel.parse()?,
            grid: EvalGrid::equispaced(self.grid.min, self.grid.max, self.grid.points)?,
            bandwidth,
            cv_loss: self.cv_loss.parse()?,
            base_seed: self.base_seed,
            noise_scale: self.noise_scale,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSeeds {
    pub index: usize,
    pub censoring_target: f64,
    pub n: usize,
    pub censor_location: f64,
    pub seeds: Vec<u64>,
}

/// Everything needed to rerun a study exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: StudyFile,
    pub base_seed: u64,
    pub cells: Vec<CellSeeds>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(file: &StudyFile, config: &StudyConfig, started_unix: u64) -> Result<Self> {
        let cells = config
            .cells()?
            .into_iter()
            .map(|c| CellSeeds {
                index: c.index,
                censoring_target: c.target_cp,
                n: c.n,
                censor_location: c.censor_location,
                seeds: (0..config.replications)
                    .map(|r| replication_seed(config.base_seed, c.index, r))
                    .collect(),
            })
            .collect();
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: file.clone(),
            base_seed: config.base_seed,
            cells,
            started_unix,
            finished_unix: started_unix,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("manifest: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
