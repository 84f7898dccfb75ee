//! Experiment runner for `flavors-core`: configuration files, presets with
//! the published parameter sets, CSV/JSON artifacts, a parallel error sweep
//! and the `flavors` command line.

pub mod app;
pub mod cli;
pub mod config;
pub mod io;
pub mod sweep;

pub use config::{Experiment, RunConfig, RunMode};
