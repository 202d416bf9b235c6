//! Files, fixtures and the command line around `pnmc-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod report;

pub use cli::run;
pub use error::{CliError, Result};
