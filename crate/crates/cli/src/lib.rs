//! Command-line driver for the fracwave library: TOML run configurations,
//! subcommand dispatch and deterministic artifact output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod descriptor;
pub mod dispatch;
pub mod error;

pub use config::{parse_config, print_config, RunSpec};
pub use error::{CliError, Result};
