//! Command-line driver: `fit`, `simulate` and `study` subcommands.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags or config), 1 on
//! data errors (malformed input, failed I/O).

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::{run, Cli};
pub use error::{CliError, Result};
