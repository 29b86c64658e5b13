//! Batch driver for the `skewho` analyses: parses a run configuration, executes one
//! job per `ε` on a bounded thread pool and renders CSV or JSON reports.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, JobOutput, JobRecord, RunOutput};
pub use config::{parse_eps, parse_eps_list, CommandKind, FKind, Format, GridSpec, PotentialSpec, Recipe, RunConfig, Strategy};
