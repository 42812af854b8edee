//! Config ingestion, file formats and the subcommands behind the `vortex` binary.

pub mod commands;
pub mod config;
pub mod format;

pub use commands::{run, CliError, Outcome};
pub use config::{Command, RunConfig};
