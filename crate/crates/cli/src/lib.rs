//! Batch runner for the Markoff verification suites.
//!
//! A run fans `(suite, prime)` tasks out over a worker pool and writes one
//! JSON-lines file and one CSV summary per suite. Output is ordered by suite
//! and prime, so it does not depend on the number of workers.

use std::path::{Path, PathBuf};

pub mod config;
pub mod record;
pub mod runner;
pub mod suites;

pub use config::{PrimeRange, RunConfig, Suite};
pub use record::{report_merge, Record, RunReport, Status, Violation, SCHEMA_VERSION};
pub use runner::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema version {found} in {} does not match version {expected} in {}", path.display(), first.display())]
    SchemaMismatch { expected: u32, found: u32, first: PathBuf, path: PathBuf },
    #[error(transparent)]
    Core(#[from] markoff_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Every error is a configuration, usage or I/O problem; verification
    /// failures are reported through records instead.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
