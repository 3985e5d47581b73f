use std::path::PathBuf;

use idgauss::{DecomposeError, LinalgError, SimError, ZooError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("input is not positive definite: {0}")]
    NotPd(String),
    #[error("{0}")]
    Usage(String),
    #[error("not infinitely divisible: {0}")]
    NotId(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NotId(_) => 3,
            _ => 1,
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotPositiveDefinite { .. } | LinalgError::Singular { .. } => CliError::NotPd(e.to_string()),
            LinalgError::NotSymmetric { .. }
            | LinalgError::NotSquare { .. }
            | LinalgError::NonFinite { .. }
            | LinalgError::DimensionMismatch { .. } => CliError::Parse(e.to_string()),
            LinalgError::InvalidTolerances => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DecomposeError> for CliError {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::NotId(w) => CliError::NotId(w),
            DecomposeError::Linalg(e) => e.into(),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Linalg(e) => e.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ZooError> for CliError {
    fn from(e: ZooError) -> Self {
        match e {
            ZooError::Linalg(e) => e.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}
