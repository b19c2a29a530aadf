//! Configuration files, CSV/JSON output, parallel drivers and the
//! `ssh2d` command line on top of [`ssh2d_core`].

pub mod cli;
pub mod config;
pub mod output;
pub mod runner;

pub use config::{parse_config, ConfigError, RunConfig};
