//! Scenario files, CSV experiments and the `oris-link` command line on top
//! of `oris-link-core`.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{parse_config, PePreset, ScenarioConfig};
pub use experiments::{run_experiment, Experiment, RunError, RunOptions};
