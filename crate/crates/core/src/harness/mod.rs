//! Scenario generation, training data, experiments and run plumbing.

mod experiment;
mod gendata;
mod run;
mod scenario;
mod strategy;

pub use experiment::{experiment_scenario, run_experiment, BaselineRow, Experiment, ExperimentOptions, ExperimentOutcome};
pub use gendata::{generate_rows, generate_training_dataset, training_scenarios, trial_costs, Family, GenDataOptions, GenDataSummary};
pub use run::{phase_count, run_simulation, RunOptions};
pub use scenario::{generate_positions, generate_scenario, GeneratorSpec, Region, ScenarioSpec};
pub use strategy::{BuiltStrategy, StrategySpec};
