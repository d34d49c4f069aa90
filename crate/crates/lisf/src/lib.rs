//! File formats, pipeline commands and the command-line front end over
//! `lisf-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod input;
pub mod pipeline;

pub use error::{CliError, Result};
