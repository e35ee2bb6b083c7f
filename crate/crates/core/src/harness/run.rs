use super::scenario::{generate_scenario, ScenarioSpec};
use super::strategy::StrategySpec;
use crate::config::enumerate_configurations;
use crate::error::Result;
use crate::sim::{Simulation, SimulationReport, TimingSource};
use crate::tuning::TuningController;
use std::time::Duration;

#[derive(Clone, Default)]
pub struct RunOptions {
    pub timing: TimingSource,
    /// Wall-clock budget for the whole run.
    pub budget: Option<Duration>,
}

/// Number of tuning phases a run of `iterations` iterations starts.
pub fn phase_count(iterations: usize, tuning_interval: usize) -> usize {
    iterations.div_ceil(tuning_interval.max(1))
}

/// Generates the scenario's particles and simulates them under `strategy`.
/// Setup problems are errors; failures during the run end up in the report.
pub fn run_simulation(spec: &ScenarioSpec, strategy: &StrategySpec, options: &RunOptions) -> Result<SimulationReport> {
    let particles = generate_scenario(spec)?;
    let space = enumerate_configurations();
    let phases = phase_count(spec.params.total_iterations, spec.tuning.tuning_interval);
    let built = strategy.build(space.len(), phases)?;
    let controller = TuningController::new(built.strategy, space, spec.tuning, spec.params.rebuild_interval);
    let sim = Simulation::new(particles, spec.params.clone(), controller, options.timing.clone())?;
    let mut report = sim.run(options.budget);
    report.model_file = built.model_file;
    Ok(report)
}
