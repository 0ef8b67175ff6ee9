use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration.
    #[error("{0}")]
    Usage(String),

    /// Malformed or unusable input data.
    #[error("{0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Configuration-level library errors are usage errors; the rest concern data.
impl From<censored_llr::Error> for CliError {
    fn from(e: censored_llr::Error) -> Self {
        use censored_llr::Error as E;
        match e {
            E::InvalidBandwidth(_)
            | E::InvalidBandwidthGrid(_)
            | E::InvalidEvalGrid(_)
            | E::InvalidStudy(_)
            | E::CensoringTarget(_)
            | E::InvalidSimulation(_)
            | E::UnknownKernel(_)
            | E::UnknownCvLoss(_)
            | E::UnknownEstimator(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
