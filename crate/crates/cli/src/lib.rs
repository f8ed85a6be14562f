//! Experiment runner and verification suite for `twirlkit`.

pub mod checks;
pub mod config;
pub mod output;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, Probe};
pub use run::{run, RunError, RunRecord};

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "TWIRLKIT_THREADS";
