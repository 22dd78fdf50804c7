//! File IO, the benchmark runner and the `pasp` command line on top of
//! [`pasp_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod runner;

pub use error::CliError;
