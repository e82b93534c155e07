// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use bosent_core::Error as CoreError;

/// Failure of a run, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Invalid or unreadable configuration; `pointer` is a JSON pointer
    /// into the config document (empty for the whole document).
    Config { pointer: String, message: String },
    /// A checked property did not hold (bound margin, positivity, oracle
    /// agreement).
    Invariant(String),
    /// The numerics could not produce a trustworthy result.
    Numerical(String),
    /// Output could not be written.
    Io(String),
}

impl CliError {
    pub fn config(pointer: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Config {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Classifies an error raised while running a task. Argument-shaped
    /// failures count as configuration errors at `pointer`.
    pub fn from_core(err: CoreError, pointer: &str) -> Self {
        match err {
            CoreError::PositivityViolation(_) | CoreError::InvalidState(_) => CliError::Invariant(err.to_string()),
            CoreError::NegativeEigenvalueInR { .. } | CoreError::ValidityGateFailed(_) => {
                CliError::Numerical(err.to_string())
            }
            other => CliError::config(pointer, other),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { pointer, message } if pointer.is_empty() => write!(f, "config error: {message}"),
            CliError::Config { pointer, message } => write!(f, "config error at {pointer}: {message}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
