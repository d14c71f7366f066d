//! Scenario files, command drivers and output formats for `bubblelab-core`.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod record;
pub mod runner;

pub use error::{CliError, Result};
