//! Configuration, orchestration and persistence for the `mhd1d` binary.

pub mod config;
pub mod records;
pub mod run;
pub mod snapshot;
pub mod sweep;
pub mod verify;

use std::fmt;

pub use config::{parse_config, ConfigError, ProfileSpec, RunConfig};
pub use records::{emit_diagnostics, record_json};
pub use run::{run, RunSummary};
pub use snapshot::{emit_snapshot, load_snapshot, SnapshotError};
pub use sweep::{parse_axis, sweep, Axis, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STEP_FAILURE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(String),
    Step(String),
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Step(_) => EXIT_STEP_FAILURE,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Step(e) => write!(f, "step failure: {e}"),
            CliError::Verification(e) => write!(f, "verification failed: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Read and parse a configuration file.
pub fn read_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(ConfigError {
            line: None,
            key: String::new(),
            message: format!("cannot read {}: {e}", path.display()),
        })
    })?;
    parse_config(&text).map_err(CliError::Config)
}
