//! Config-driven experiment driver for `laxlab_core`.

pub mod config;
pub mod run;

pub use config::{Config, ConfigError, ExperimentConfig, ExperimentKind};
pub use run::{run, run_path, run_sections, RunError, RunOptions, RunSummary, SectionOutput};
