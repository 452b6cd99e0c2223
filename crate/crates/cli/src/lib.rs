//! Batch experiments for FoReL dynamics: configuration files, CSV/JSON
//! output and the `simulate`, `analyze`, `equilibrium` and `sweep` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use io::Format;
