//! Verification suites, evaluation commands and reports for namebench.

pub mod cli;
pub mod commands;
pub mod gen;
pub mod report;
pub mod settings;
pub mod suites;

pub use report::{CaseRecord, CommandReport, Provenance, SuiteReport};
pub use settings::{Format, Settings};
pub use suites::{run_suite, SUITES};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unparseable inputs, unknown suites: exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    /// The dispatched operation failed: exit code 1.
    #[error(transparent)]
    Operation(#[from] namebench_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parse errors in user input are usage errors.
pub(crate) fn parse<T>(what: &str, text: &str) -> Result<T, CliError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    text.parse()
        .map_err(|e| CliError::Usage(format!("cannot parse {what} {text:?}: {e}")))
}
