//! Experiment orchestration on top of `persuade-core`: JSON configs, parallel seed
//! sweeps, CSV logs, summary statistics and SVG regret plots.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, InstanceFile, InstanceSource};
pub use error::CliError;
pub use runner::{cmd_run, run_experiment, RunOutput};
