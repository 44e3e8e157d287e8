//! Experiment orchestration for the SPDE laboratory: configuration parsing,
//! deterministic run manifests, ensemble execution and CSV/JSON/SVG output.

pub mod config;
pub mod manifest;
pub mod plots;
pub mod runner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    /// Bad configuration file or invalid field values (exit code 2).
    #[error("config error: {0}")]
    Config(String),

    /// Numerical or runtime failure while executing the task (exit code 3).
    #[error("run failed: {0}")]
    Numerical(String),
}

impl From<spdelab_core::CoreError> for RunError {
    fn from(e: spdelab_core::CoreError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Numerical(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for RunError {
    fn from(e: serde_json::Error) -> Self {
        RunError::Numerical(format!("serialization: {e}"))
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}
