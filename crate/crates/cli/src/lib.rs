//! Batch front end for topokit: file formats, plots and the subcommands of
//! the `topokit` binary.

pub mod commands;
pub mod io;
pub mod svg;

pub use commands::{exit, run, Cli, CliError};
