use std::fmt;

use poqg_core::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 2,
    Data = 3,
    Internal = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Data,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            kind: ExitKind::Internal,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind as i32
    }

    /// Prefix the message with where it happened.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Classify a library error: bad parameters are configuration errors,
/// unreadable or unsuitable inputs are data errors.
pub fn exit_kind(e: &Error) -> ExitKind {
    match e {
        Error::Config(_) | Error::Diverged => ExitKind::Config,
        Error::Parse { .. }
        | Error::InsufficientSamples { .. }
        | Error::DimensionMismatch { .. }
        | Error::Data(_)
        | Error::NoDangerPoints
        | Error::Io(_)
        | Error::Csv(_) => ExitKind::Data,
        Error::Leakage { .. } | Error::Json(_) => ExitKind::Internal,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            kind: exit_kind(&e),
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
