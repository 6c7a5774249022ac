//! Command-line surface: configuration parsing, commands and CSV writers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError};
pub use config::{parse_config, to_toml, ConfigError, Mode, RunConfig};
