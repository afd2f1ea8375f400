//! Simulation harness for the hybrid-ee solver: scenario files, Monte Carlo
//! sweeps over one parameter, CSV tables and SVG charts.
//!
//! The `hybrid-ee` binary wraps these pieces; everything it does is also
//! reachable from the library so tests can drive sweeps directly.

pub mod check;
pub mod config;
pub mod output;
pub mod sweep;

use std::io;

pub use config::{Scenario, SimConfig, SweepSpec, SweptParameter};
pub use output::{emit_outputs, OutputFormat};
pub use sweep::{run_sweep, summarize, ResultRow, SummaryRow};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const ORACLE_VIOLATION: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("cannot read config file {path}: {source}")]
    ConfigIo { path: String, source: io::Error },
    #[error(transparent)]
    Model(hybrid_ee::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("csv error: {0}")]
    Csv(String),
}

impl SimError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> SimError {
        SimError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config { .. } | SimError::ConfigIo { .. } => exit::CONFIG,
            SimError::Model(e) if sweep::is_infeasible(e) => exit::INFEASIBLE,
            _ => exit::FAILURE,
        }
    }
}

impl From<hybrid_ee::Error> for SimError {
    fn from(e: hybrid_ee::Error) -> SimError {
        match e {
            // a bad model parameter always traces back to user input
            hybrid_ee::Error::InvalidParameter { field, reason } => {
                SimError::Config { field, reason }
            }
            other => SimError::Model(other),
        }
    }
}
