//! Configuration, experiment drivers and file output for the `lbsphere`
//! command-line tool.

pub mod config;
pub mod error;
pub mod experiment;
pub mod summary;
pub mod tools;

pub use config::{InitSource, KeyValues, RadiusSpec, RunConfig};
pub use error::{exit, CliError, CliResult};
pub use experiment::{compare_methods, run, success_rate_experiment, Expectation, StartKind};
pub use summary::RunSummary;
