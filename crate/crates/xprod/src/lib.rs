//! Command-line front end for `xprod-core`: system, element, castle and
//! witness files, deterministic JSON reports, and one function per
//! subcommand.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod literal;
pub mod report;

pub use cli::{run, Cli};
pub use error::CliError;
pub use report::Report;
