use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset must contain at least one record")]
    EmptyDataset,

    #[error("record {index}: {field} is not finite")]
    NonFinite { index: usize, field: &'static str },

    #[error("invalid simulation config: {0}")]
    InvalidSimulation(String),

    #[error("censoring target {0} must lie strictly between 0 and 1")]
    CensoringTarget(f64),

    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("invalid bandwidth grid: {0}")]
    InvalidBandwidthGrid(String),

    #[error("invalid evaluation grid: {0}")]
    InvalidEvalGrid(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid study config: {0}")]
    InvalidStudy(String),

    #[error("cross-validation needs at least 2 records, got {0}")]
    TooFewRecords(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("evaluation point {0} is not finite")]
    NonFiniteEvalPoint(f64),

    #[error("unknown kernel family `{0}` (expected gaussian or epanechnikov)")]
    UnknownKernel(String),

    #[error("unknown cross-validation loss `{0}` (expected ipcw or synthetic)")]
    UnknownCvLoss(String),

    #[error("unknown estimator `{0}` (expected llr, llr_pseudo or cr)")]
    UnknownEstimator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
