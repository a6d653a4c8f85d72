//! Command-line front end for the ALIP-DRS walking simulator.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::fmt;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    /// Malformed config text; the message carries line and column.
    Parse(String),
    /// Well-formed config with invalid values.
    Config(String),
    Ratio(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Parse(m) => write!(f, "config parse error: {m}"),
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Ratio(m) => write!(f, "period ratio mismatch: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<alip_drs::Error> for CliError {
    fn from(e: alip_drs::Error) -> Self {
        use alip_drs::Error;
        match e {
            Error::RatioMismatch { .. } => CliError::Ratio(e.to_string()),
            Error::InvalidArgument(_) | Error::PlaneMismatch { .. } => CliError::Config(e.to_string()),
            Error::InsufficientData(_) | Error::NotStabilizable { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
