//! CLI error taxonomy with a stable exit-code mapping.

use std::fmt;

/// Exit codes: 0 ok, 2 usage/IO, 3 data, 4 engine.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, missing required options, unreadable paths.
    Usage(String),
    /// Malformed or unusable input data.
    Data(String),
    /// A detector or surrogate engine failed.
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Engine(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Engine(msg) => write!(f, "engine error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
