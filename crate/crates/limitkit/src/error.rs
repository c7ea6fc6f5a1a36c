//! Error classification for the command-line front end.
//!
//! Failures map to distinct exit codes so scripts can tell input problems
//! apart from broken configuration or a failed fit: 3 for I/O, 4 for
//! validation/configuration, 5 for numerical failures. Usage errors exit 2
//! through clap. Every failure also emits a one-line JSON record on stderr.

use std::fmt;
use std::process::ExitCode;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    Io,
    Validation,
    Numerical,
}

impl ErrorClass {
    pub fn exit_code(self) -> ExitCode {
        match self {
            ErrorClass::Io => ExitCode::from(3),
            ErrorClass::Validation => ExitCode::from(4),
            ErrorClass::Numerical => ExitCode::from(5),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Io,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Validation,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            class: ErrorClass::Numerical,
            message: message.into(),
        }
    }

    /// One-line machine-readable record for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: ErrorClass,
            message: &'a str,
        }
        serde_json::to_string(&Record {
            error: self.class,
            message: &self.message,
        })
        .expect("error record serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<limitkit_core::spectrum::SpectrumError> for CliError {
    fn from(e: limitkit_core::spectrum::SpectrumError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<limitkit_core::collapse::CollapseError> for CliError {
    fn from(e: limitkit_core::collapse::CollapseError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<limitkit_core::pep::PepError> for CliError {
    fn from(e: limitkit_core::pep::PepError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<limitkit_core::sim::SimError> for CliError {
    fn from(e: limitkit_core::sim::SimError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<limitkit_core::constants::ConstantsError> for CliError {
    fn from(e: limitkit_core::constants::ConstantsError) -> Self {
        CliError::validation(e.to_string())
    }
}

impl From<limitkit_core::fit::FitError> for CliError {
    fn from(e: limitkit_core::fit::FitError) -> Self {
        CliError::numerical(e.to_string())
    }
}
