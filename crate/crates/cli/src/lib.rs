//! Library side of the `mccm` command-line tool: dataset and grid I/O, run
//! configuration, and the command implementations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod grid;

pub use config::{Method, RunConfig};
pub use error::{CliError, Result};
