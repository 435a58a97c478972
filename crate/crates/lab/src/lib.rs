//! Experiment driver for `cattaneo-core`: TOML configuration, the command
//! implementations behind the `cattaneo` binary, CSV/JSON/gnuplot output and
//! the acceptance suite.

// NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::ExperimentConfig;
