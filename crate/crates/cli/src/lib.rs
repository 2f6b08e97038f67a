//! Library half of the `sgdpaths` binary: argument types, file formats,
//! SVG rendering, and the subcommand implementations. The binary itself
//! is a thin dispatcher so integration tests can drive everything
//! in-process as well as through the executable.

pub mod args;
pub mod commands;
pub mod io;
pub mod svg;

use std::fmt;

/// Errors surfaced to the user, tagged with the process exit code:
/// 2 for usage/input problems, 3 for numeric divergence.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Divergence(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Divergence(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sgdpaths::Error> for CliError {
    fn from(e: sgdpaths::Error) -> Self {
        match e {
            sgdpaths::Error::Divergence { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
