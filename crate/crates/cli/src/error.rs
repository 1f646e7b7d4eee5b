use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error("formula inconsistency: {0}")]
    Formula(String),
}

impl CliError {
    /// 1 parse, 2 invalid profile/parameters, 3 unwritable output,
    /// 4 formula inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Output { .. } => 3,
            CliError::Formula(_) => 4,
        }
    }
}

impl From<mfsec_core::Error> for CliError {
    fn from(e: mfsec_core::Error) -> Self {
        use mfsec_core::Error as E;
        match e {
            E::FormulaInconsistency { .. } | E::Quadrature { .. } => CliError::Formula(e.to_string()),
            E::UnknownSweepParameter(_) | E::UnknownScheme(_) => CliError::Parse(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
