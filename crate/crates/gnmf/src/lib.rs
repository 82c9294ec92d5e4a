//! File formats, experiment runner and command-line interface for
//! `gnmf-core`.

pub mod cli;
pub mod config;
mod error;
pub mod experiment;
pub mod io;

pub use error::{Error, Result};
