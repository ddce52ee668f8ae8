//! File formats, configuration and subcommands for the `levy-pricer` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

pub use commands::Output;
pub use config::{Auto, Format, Model, RunConfig};
pub use error::{CliError, Result};
