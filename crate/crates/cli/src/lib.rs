//! Command-line front end: config loading, experiment orchestration and
//! artifact files (`metrics.csv`, `summary.json`).

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

pub use commands::{parse_mus, run_gan, run_quadratic, sweep_mu, verify_graph, Check, Outcome};
pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::CliError;
