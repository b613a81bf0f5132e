//! Library side of the `bohr` command-line tool.

pub mod commands;
pub mod report;

pub use commands::{CliError, OpArgs, OpName, Outcome, RMode};
pub use report::{RunReport, Table};
