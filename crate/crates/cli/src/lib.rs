//! Command-line front end for the oblivious join.

pub mod commands;
pub mod table_file;

pub use commands::{cmd_bench, cmd_cost, cmd_join, cmd_verify, CliError, TraceMode};
pub use table_file::{ParseError, TableFile};
