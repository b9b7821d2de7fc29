//! Command-line experiments for `rarz`: config files, the commands
//! behind the `rarz` binary, and the file formats they write.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cli::run_cli;
pub use config::{Command, ExperimentConfig};
pub use error::CliError;
