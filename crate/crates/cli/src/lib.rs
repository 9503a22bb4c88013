//! Configuration parsing, command implementations and output formatting for
//! the `dimer` binary.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use cli::run;
pub use error::CliError;
