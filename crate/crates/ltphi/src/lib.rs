//! JSON configuration, verification suites and reports on top of
//! `ltphi-core`. The `ltphi` binary is a thin wrapper around [`run_verify`]
//! and [`run_herr`].

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ModuleSpec, RunConfig};
pub use report::{CheckResult, Verdict, VerifyReport};
pub use suites::{run_herr, run_verify, SUITES};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

/// Core errors raised while resolving a configuration.
impl From<ltphi_core::Error> for CliError {
    fn from(e: ltphi_core::Error) -> CliError {
        CliError::Config(e.to_string())
    }
}
