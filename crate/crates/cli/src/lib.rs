//! Configuration, orchestration and file output for `wavefront-psa`.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

pub use commands::{execute, Report};
pub use config::{parse_config, Command, Overrides, RunPlan};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] wavefront_core::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for numerical aborts and I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}
