//! Exit-code discipline: 0 success, 2 usage error, 3 precondition violation,
//! 1 anything else (io).

use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precondition(String),
    Io(String),
}

impl CliError {
    pub fn report(&self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Precondition(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(3)
            }
            CliError::Io(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

impl From<urq_core::Error> for CliError {
    fn from(e: urq_core::Error) -> Self {
        match e {
            urq_core::Error::Io(io) => CliError::Io(io.to_string()),
            urq_core::Error::Parameter(_)
            | urq_core::Error::Domain(_)
            | urq_core::Error::Dimension(_)
            | urq_core::Error::VacuousBound { .. }
            | urq_core::Error::Unsupported(_) => CliError::Precondition(e.to_string()),
            urq_core::Error::Parse(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
