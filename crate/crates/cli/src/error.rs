use movbound::Error;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("gate failed: {0}")]
    Gate(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Domain(_) | Error::OutOfDomain(_) | Error::Precondition(_) | Error::Io(_) => {
                CliError::Config(e.to_string())
            }
            Error::SingularGeometry(_) | Error::InsufficientData(_) | Error::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

/// Machine-readable failure record.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Gate(_) => 4,
        }
    }

    pub fn record(&self) -> ErrorRecord {
        let (kind, message) = match self {
            CliError::Config(m) => ("config", m),
            CliError::Numerical(m) => ("numerical", m),
            CliError::Gate(m) => ("gate", m),
        };
        ErrorRecord { kind, exit_code: self.exit_code(), message: message.clone() }
    }
}
