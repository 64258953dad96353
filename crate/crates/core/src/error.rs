use thiserror::Error;

/// Errors surfaced by the library and mapped onto CLI exit codes.
#[derive(Debug, Error)]
pub enum OkpError {
    /// Missing or inconsistent parameters (algorithm spec, prediction, bounds).
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed or out-of-contract input data.
    #[error("data error: {0}")]
    Data(String),
    /// A numeric argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// An algorithm produced a decision that violates capacity or integrality.
    #[error("invariant violation: {0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl OkpError {
    /// Process exit code: 1 config, 2 data, 3 internal invariant violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            OkpError::Config(_) => 1,
            OkpError::Data(_) | OkpError::Domain(_) | OkpError::Io(_) | OkpError::Csv(_) => 2,
            OkpError::Infeasible(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, OkpError>;
