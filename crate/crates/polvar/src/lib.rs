//! Command-line runner for `polvar-core`: configuration, file formats,
//! parallel Monte Carlo and run reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;

pub use error::{CliError, CliResult};
