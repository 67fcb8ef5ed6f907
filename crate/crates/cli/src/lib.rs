//! Experiment harness: configuration, execution over a seed grid, and
//! aggregation of the resulting metric curves.

pub mod aggregate;
pub mod config;
pub mod error;
pub mod experiment;

pub use aggregate::{
    aggregate_runs, cost_reduction_factor, AggregateCurve, CostReduction, RunCurve,
};
pub use config::{Algorithm, ExperimentConfig, RawConfig};
pub use error::{HarnessError, Result};
pub use experiment::{
    aggregate_directory, load_or_build_reference, problem_for, run_experiment, seed_csv_name,
    ExperimentOutcome, THREADS_ENV,
};
