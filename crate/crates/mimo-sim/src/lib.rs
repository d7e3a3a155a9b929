//! Experiment harness around `mimo-core`: key-value config files, parallel
//! sweeps with order-independent reductions, and CSV/JSON writers.

pub mod config;
pub mod report;
pub mod sweep;

use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(mimo_core::Error),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl From<mimo_core::Error> for HarnessError {
    fn from(e: mimo_core::Error) -> Self {
        HarnessError::Domain(e)
    }
}

impl HarnessError {
    /// Process exit code: 1 for validation problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
