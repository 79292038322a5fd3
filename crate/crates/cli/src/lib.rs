//! Experiment driver for `qlandscape`.
//!
//! Every subcommand is a plain function from a resolved [`ExperimentConfig`]
//! to a report struct, writing its CSV artifacts on the way.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Experiment, ExperimentConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Core(#[from] qlandscape::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
