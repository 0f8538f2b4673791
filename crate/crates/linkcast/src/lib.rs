//! File formats, reports and the command line around `linkcast-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod edgelist;
pub mod error;
pub mod files;
pub mod output;
pub mod svg;

pub use error::{Error, Result};
