//! Configuration parsing and experiment dispatch for the `fpet` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, ExperimentSpec};
pub use run::{run, run_file, CliError, Context, Outcome, RunOptions, Status};
