//! Benchmark driver for the extended-neighbourhood-rule ensemble and its
//! kNN-family baselines: configuration, repeated seeded splits, method
//! dispatch, result tables and boxplot emission.

pub mod boxplot;
pub mod config;
pub mod error;
pub mod results;
pub mod runner;
pub mod scenario;

pub use config::{DatasetSource, ExperimentConfig, Method};
pub use error::{CliError, Result};
pub use results::{ResultRow, ResultsTable, SummaryRow};
pub use runner::run_experiment;
