//! Experiment configuration, runners and artifact output.

pub mod config;
pub mod fit;
mod run;

pub use config::{defaults_toml, parse_config, ExperimentConfig, ExperimentKind};
pub use run::{
    run_experiment, tensorization_table, FitRow, Relation, RunReport, TensorRow, ENERGY_TOLERANCE, PREFACTOR_SLACK,
    TENSOR_TOLERANCE,
};
