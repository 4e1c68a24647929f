//! Command-line front end: stack files, dispersion tables and the `standwave` commands.

pub mod commands;
pub mod dispersion;
pub mod error;
pub mod output;
pub mod stack_file;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
