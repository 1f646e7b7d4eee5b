use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {0} is outside the domain (must be positive and finite)")]
    Domain(f64),
    #[error("invalid SNR profile: {field} = {value} (must be positive and finite)")]
    InvalidProfile { field: &'static str, value: f64 },
    #[error("invalid target rate {0} (must be nonnegative and finite)")]
    InvalidRate(f64),
    /// A closed form left [0, 1] by more than round-off. Points at a
    /// transcription problem in the formula rather than at the inputs.
    #[error("{scheme} closed form evaluated to {value}, outside [0, 1]")]
    FormulaInconsistency { scheme: &'static str, value: f64 },
    #[error("quadrature did not converge: error estimate {achieved:e} exceeds tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("unknown sweep parameter `{0}`")]
    UnknownSweepParameter(String),
    #[error("unknown scheme `{0}` (expected mf, dt, df or cj)")]
    UnknownScheme(String),
    #[error("sweep grid must be nonempty, finite and strictly increasing")]
    InvalidGrid,
    #[error("block length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("channel state has zero magnitude; no key can be derived")]
    UnusableKey,
    #[error("invalid quantizer configuration: {0}")]
    InvalidQuantizer(&'static str),
    #[error("invalid PSK order {0} (must be a power of two, at least 2)")]
    InvalidConstellation(u32),
    #[error("number of trials must be at least 1")]
    NoTrials,
}

pub type Result<T> = core::result::Result<T, Error>;
