//! Command-line front end for `mfsec-core`: run specifications, a threaded
//! Monte Carlo driver, deterministic CSV output and the validation report.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;
pub mod table;
pub mod validate;

pub use config::{Command, Overrides, RunSpec};
pub use error::{CliError, Result};
