use std::fmt;
use std::io;
use std::path::Path;

/// Process exit codes. These are part of the command-line contract.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_EMPTY: u8 = 4;
pub const EXIT_LIMIT: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    pub fn empty(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_EMPTY,
            message: message.into(),
        }
    }

    pub fn limit(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_LIMIT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<shardbench::CorpusError> for CliError {
    fn from(err: shardbench::CorpusError) -> Self {
        use shardbench::CorpusError::*;
        let code = match err {
            FileNotFound(_) | Io { .. } => EXIT_IO,
            InvalidSpec(_) | SpaceExhausted { .. } => EXIT_USAGE,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

impl From<shardbench::ConfigError> for CliError {
    fn from(err: shardbench::ConfigError) -> Self {
        CliError::usage(err.to_string())
    }
}

impl From<shardbench::StatsError> for CliError {
    fn from(err: shardbench::StatsError) -> Self {
        use shardbench::StatsError::*;
        match err {
            EmptyHistogram => CliError::empty("no names to analyze"),
            other => CliError::usage(other.to_string()),
        }
    }
}
