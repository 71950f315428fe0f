//! Experiment driver: configuration, the MFG solve, policy comparisons and
//! parameter sweeps, all written out as CSV with a run manifest.

pub mod commands;
pub mod config;
mod error;
pub mod manifest;

pub use commands::{cmd_compare, cmd_solve_mfg, cmd_sweep, Axis};
pub use config::{parse_config, parse_config_str, ExperimentConfig};
pub use error::CliError;
pub use manifest::{RunManifest, SolverReport};
