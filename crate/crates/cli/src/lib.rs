//! Subcommands of the `pq-slln` binary.
//!
//! Exit codes: 0 success, 1 runtime failure, violated inequality or hard contradiction,
//! 2 configuration error, 3 inconclusive membership.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

pub use error::{CliError, Result};

/// Serialization of tabular outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}
