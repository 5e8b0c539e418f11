use srbm2d::{Error, ValidationReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),

    /// Impossible case, or two criteria that should agree did not.
    #[error("impossible case: {0}")]
    Impossible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle: {0}")]
    Infeasible(String),

    #[error("{0}")]
    Failed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) | CliError::Failed(_) => 1,
            CliError::Impossible(_) => 3,
            CliError::Config(_) => 4,
            CliError::Infeasible(_) => 5,
            CliError::Io(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInstance(r) => CliError::Invalid(r),
            Error::ImpossibleCase(_) | Error::InconsistentCriteria(_) | Error::Unclassifiable => {
                CliError::Impossible(e.to_string())
            }
            Error::ConfigError(_) => CliError::Config(e.to_string()),
            Error::NoFeasiblePath => CliError::Infeasible(e.to_string()),
            Error::ZeroDirection | Error::NegativeDirection(..) => CliError::Parse(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}
