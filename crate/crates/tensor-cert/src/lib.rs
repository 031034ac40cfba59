//! Experiment harness behind the `tensor-cert` command-line tool.
//!
//! Each experiment is a pure function of its configuration: every trial
//! derives its own random stream as `child(master_seed, [experiment_id,
//! grid_index, trial_index])`, so results are reproducible bit for bit
//! and independent of trial scheduling.

pub mod experiments;
pub mod table;

pub use experiments::{run_experiment, ExperimentConfig, ExperimentName};
pub use table::{ColumnKind, Table};
