//! Command-line driver for the `cauchy_core` verification suites and experiments.
//!
//! Each subcommand turns an [`ExperimentConfig`] into a [`ResultTable`]: one row per
//! reported or checked quantity, tagged with the hash of the resolved config.

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{run, Command};
pub use config::ExperimentConfig;
pub use table::ResultTable;

/// Exit status when every checked row passes.
pub const EXIT_PASS: i32 = 0;
/// Exit status for usage and configuration errors.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status when at least one checked row fails.
pub const EXIT_FAIL: i32 = 2;
