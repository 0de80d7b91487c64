//! Monte Carlo experiments, file formats and the `frontier` command-line tool
//! built on top of `frontier-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::LabError;
pub use experiments::{run_replicates, ExperimentPlan, ExperimentReport};
