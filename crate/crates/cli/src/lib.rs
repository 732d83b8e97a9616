//! Batch front end: TOML configs in, headed CSVs and a manifest out.

pub mod config;
pub mod freq;
pub mod run;

pub use config::{parse_config, parse_config_str, Protocol, RunConfig};
pub use run::{run, RunSummary};
