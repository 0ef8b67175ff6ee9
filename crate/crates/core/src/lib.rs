//! Local linear regression for right-censored responses.
//!
//! Responses `Z` are observed only through `Y = min(Z, C)` and `delta = 1{Z <= C}`.
//! Each uncensored response is reweighted by the inverse of the Kaplan–Meier
//! estimate of the censoring survival function, giving synthetic responses
//! whose conditional mean matches that of `Z`. Those are then smoothed with a
//! kernel-weighted local linear fit ([`estimators::llr_fit`]) or with the
//! locally constant Nadaraya–Watson baseline ([`estimators::cr_fit`]).
//!
//! The [`evaluation`] module runs seeded Monte Carlo studies comparing the two
//! smoothers over a grid of sample sizes and censoring rates.
//!
//! ```
//! use censored_llr::prelude::*;
//!
//! let config = SimulationConfig::new(200, 0.2, calibrate_censor_location(0.3, 0.2).unwrap(), 7);
//! let sim = simulate(&config).unwrap();
//! let km = km_censoring_survival(&sim.data).unwrap();
//! let synth = synthetic_responses(&sim.data, &km);
//! let h = Bandwidth::new(0.4).unwrap();
//! let fit = llr_fit(&sim.data, &synth, &[-1.0, 0.0, 1.0], h, KernelSpec::Gaussian).unwrap();
//! assert_eq!(fit.estimates.len(), 3);
//! ```

pub mod bandwidth;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod kernels;
pub mod sampling;
pub mod summation;
pub mod survival;
pub mod transform;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bandwidth::{cv_score, select_bandwidth, BandwidthGrid, CvLoss};
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        cr_fit, llr_fit, llr_fit_direct, llr_fit_pseudo, local_moments, EstimatorKind, FitResult,
        LocalMoments,
    };
    pub use crate::evaluation::{
        mse, rate_diagnostic, run_study, sup_error, BandwidthPlan, EvalGrid, MseReport, MseRow,
        ReplicationRecord, StudyConfig, StudyOutput,
    };
    pub use crate::kernels::{Bandwidth, KernelSpec};
    pub use crate::sampling::{
        calibrate_censor_location, simulate, Dataset, ObservedRecord, Simulated, SimulationConfig,
    };
    pub use crate::survival::{
        km_censoring_survival, NoCensoring, NormalCensoringSurvival, StepSurvival, SurvivalFunction,
    };
    pub use crate::transform::{synthetic_responses, SyntheticResponses};
}
