//! File formats, configuration, thread pool and drivers around [`ser_core`].
//!
//! The `ser` binary exposes four subcommands:
//!
//! * `build <config>` trains one variant and writes the model archive and its build report;
//! * `study <config> <model>` writes the error table of a trained model;
//! * `solve <model> --mu1 <v> --mu2 <v>` evaluates the output online;
//! * `compare <config>` builds and studies the standard, `r=5`, `r=1-rebuild` and `r=1`
//!   variants and writes their tables plus a solve-count summary.

pub mod archive;
pub mod config;
mod error;
pub mod exec;
pub mod run;
pub mod table;

pub use error::{CliError, Result};
