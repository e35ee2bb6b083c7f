//! The simulation loop hosting the tuning controller.

use crate::config::Configuration;
use crate::dynamics::{apply_thermostat, integrate_step};
use crate::error::{Error, Result};
use crate::force::{ForceEngine, Timings};
use crate::params::SimulationParams;
use crate::particles::ParticleSet;
use crate::stats::{compute_live_stats, LiveStatistics};
use crate::tuning::{Directive, PhaseRecord, TuningController, TuningLogRow};
use serde::Serialize;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Replaces measured timings: called with the configuration, phase index,
/// iteration and whether the container was rebuilt.
pub type SyntheticTimer = Arc<dyn Fn(Configuration, usize, usize, bool) -> Timings + Send + Sync>;

/// Where the timings fed to the tuner come from.
#[derive(Clone, Default)]
pub enum TimingSource {
    #[default]
    WallClock,
    Synthetic(SyntheticTimer),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IterationRecord {
    pub iteration: usize,
    pub phase_index: usize,
    pub configuration_id: String,
    pub force_time_nanos: u64,
    pub build_time_nanos: u64,
    #[serde(skip)]
    pub trial: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_file: Option<String>,
    pub iterations: Vec<IterationRecord>,
    pub phases: Vec<PhaseRecord>,
    pub tuning_log: Vec<TuningLogRow>,
    pub wall_time_nanos: u64,
    /// Set when the run stopped early; the other fields hold the partial results.
    pub error: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PhaseSummary<'a> {
    phase: usize,
    start_iteration: usize,
    selected: String,
    candidates: usize,
    trial_iterations: usize,
    stats: &'a LiveStatistics,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Summary<'a> {
    strategy: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    model_file: Option<&'a str>,
    iterations: usize,
    total_force_time_nanos: u64,
    total_build_time_nanos: u64,
    wall_time_nanos: u64,
    phases: Vec<PhaseSummary<'a>>,
    error: Option<&'a str>,
}

impl SimulationReport {
    pub fn total_force_nanos(&self) -> u64 {
        self.iterations.iter().map(|r| r.force_time_nanos).sum()
    }

    pub fn total_build_nanos(&self) -> u64 {
        self.iterations.iter().map(|r| r.build_time_nanos).sum()
    }

    pub fn total_nanos(&self) -> u64 {
        self.total_force_nanos() + self.total_build_nanos()
    }

    /// Selected configuration of every finished phase.
    pub fn selections(&self) -> Vec<Configuration> {
        self.phases.iter().map(|p| p.selected).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.iterations {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        let s = Summary {
            strategy: &self.strategy,
            model_file: self.model_file.as_deref(),
            iterations: self.iterations.len(),
            total_force_time_nanos: self.total_force_nanos(),
            total_build_time_nanos: self.total_build_nanos(),
            wall_time_nanos: self.wall_time_nanos,
            phases: self
                .phases
                .iter()
                .map(|p| PhaseSummary {
                    phase: p.phase,
                    start_iteration: p.start_iteration,
                    selected: p.selected.to_string(),
                    candidates: p.candidates.len(),
                    trial_iterations: p.trial_iterations,
                    stats: &p.stats,
                })
                .collect(),
            error: self.error.as_deref(),
        };
        Ok(serde_json::to_string_pretty(&s)?)
    }
}

pub struct Simulation {
    particles: ParticleSet,
    params: SimulationParams,
    engine: ForceEngine,
    controller: TuningController,
    timing: TimingSource,
    iteration: usize,
    records: Vec<IterationRecord>,
}

impl Simulation {
    /// Validates the parameters and computes the initial forces.
    pub fn new(particles: ParticleSet, params: SimulationParams, controller: TuningController, timing: TimingSource) -> Result<Self> {
        params.validate()?;
        let mut particles = particles;
        let mut engine = ForceEngine::new(&params, &particles);
        let first = *controller.space().first().ok_or(Error::NoCandidates)?;
        engine.compute(&mut particles, first)?;
        if let Some(g) = params.gravity {
            crate::dynamics::add_gravity(&mut particles, g);
        }
        engine.request_rebuild();
        Ok(Simulation { particles, params, engine, controller, timing, iteration: 0, records: Vec::new() })
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.particles
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn controller(&self) -> &TuningController {
        &self.controller
    }

    /// Runs one iteration, starting a tuning phase first if one is due.
    pub fn step(&mut self) -> Result<&IterationRecord> {
        let it = self.iteration;
        if self.controller.phase_due(it) {
            let stats = compute_live_stats(&self.particles, &self.params);
            self.controller.begin_phase(it, stats)?;
        }
        let (config, trial, rebuild) = loop {
            match self.controller.directive()? {
                Directive::Trial { config, sample } => {
                    // an unusable candidate is skipped without spending an iteration
                    if let Err(e) = config.validate() {
                        self.controller.record(Err(e))?;
                        continue;
                    }
                    break (config, true, sample == 0);
                }
                Directive::Run(config) => break (config, false, false),
            }
        };
        if rebuild {
            self.engine.request_rebuild();
        }
        let mut measured = Timings::default();
        let engine = &mut self.engine;
        integrate_step(&mut self.particles, &self.params, |ps| {
            measured = engine.compute(ps, config)?;
            Ok(())
        })?;
        let phase = self.controller.phase_index().unwrap_or(0);
        let timings = match &self.timing {
            TimingSource::WallClock => measured,
            TimingSource::Synthetic(f) => f(config, phase, it, measured.rebuilt),
        };
        if trial {
            self.controller.record(Ok(timings))?;
        }
        if let Some(t) = &self.params.thermostat {
            if (it + 1) % t.interval_iterations == 0 {
                apply_thermostat(&mut self.particles, t.target_temperature, t.max_delta_t)?;
            }
        }
        self.iteration += 1;
        self.records.push(IterationRecord {
            iteration: it,
            phase_index: phase,
            configuration_id: config.to_string(),
            force_time_nanos: timings.force_nanos,
            build_time_nanos: timings.build_nanos,
            trial,
        });
        Ok(self.records.last().unwrap())
    }

    /// Runs the remaining iterations. Errors, including exceeding `budget`,
    /// end the run early and are recorded in the report.
    pub fn run(mut self, budget: Option<Duration>) -> SimulationReport {
        let start = Instant::now();
        let mut error = None;
        while self.iteration < self.params.total_iterations {
            if let Some(b) = budget {
                if start.elapsed() > b {
                    let config = self.controller.current().map_or_else(|| "(tuning)".to_string(), |c| c.to_string());
                    error = Some(Error::Timeout { config, seconds: b.as_secs_f64() }.to_string());
                    break;
                }
            }
            if let Err(e) = self.step() {
                error = Some(e.to_string());
                break;
            }
        }
        SimulationReport {
            strategy: self.controller.strategy_name().to_string(),
            model_file: None,
            iterations: self.records,
            phases: self.controller.phases().to_vec(),
            tuning_log: self.controller.log().to_vec(),
            wall_time_nanos: start.elapsed().as_nanos() as u64,
            error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::enumerate_configurations;
    use crate::params::Boundary;
    use crate::particles::{Layout, Particle, ParticleTypeInfo};
    use crate::tuning::{Fixed, FullSearch, TuningSettings};
    use crate::vec3::Vec3;

    fn lattice() -> ParticleSet {
        let mut ps = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let x = Vec3::new(2.0 + 1.2 * i as f64, 2.0 + 1.2 * j as f64, 2.0 + 1.2 * k as f64);
                    ps.push(Particle::new(x, Vec3::new(0.1, -0.05, 0.02), 0));
                }
            }
        }
        ParticleSet::from_particles(vec![ParticleTypeInfo::unit(0)], ps, Layout::Aos).unwrap()
    }

    fn params(iters: usize) -> SimulationParams {
        let mut p = SimulationParams::cube(10.0, Boundary::Reflective);
        p.total_iterations = iters;
        p
    }

    #[test]
    fn zero_iterations_give_an_empty_report() {
        let space = enumerate_configurations();
        let c = TuningController::new(Box::new(FullSearch), space, TuningSettings::default(), 10);
        let r = Simulation::new(lattice(), params(0), c, TimingSource::WallClock).unwrap().run(None);
        assert!(r.iterations.is_empty() && r.phases.is_empty() && r.error.is_none());
    }

    #[test]
    fn fixed_strategy_keeps_its_configuration() {
        let space = enumerate_configurations();
        let settings = TuningSettings { tuning_interval: 20, samples_per_config: 3 };
        let c = TuningController::new(Box::new(Fixed(space[7])), space.clone(), settings, 10);
        let r = Simulation::new(lattice(), params(100), c, TimingSource::WallClock).unwrap().run(None);
        assert_eq!(r.phases.len(), 5);
        assert!(r.selections().iter().all(|s| *s == space[7]));
        assert!(r.iterations.iter().all(|i| i.configuration_id == space[7].to_string()));
    }

    #[test]
    fn full_search_picks_the_synthetic_argmin() {
        let space: Vec<_> = enumerate_configurations().into_iter().skip(10).take(2).collect();
        let cheap = space[1];
        let timer: SyntheticTimer =
            Arc::new(move |c, _, _, _| Timings { force_nanos: if c == cheap { 10 } else { 20 }, build_nanos: 0, rebuilt: false });
        let settings = TuningSettings { tuning_interval: 10, samples_per_config: 2 };
        let c = TuningController::new(Box::new(FullSearch), space.clone(), settings, 10);
        let r = Simulation::new(lattice(), params(30), c, TimingSource::Synthetic(timer)).unwrap().run(None);
        assert_eq!(r.selections(), vec![cheap; 3]);
        assert_eq!(r.iterations.iter().filter(|i| i.trial).count(), 12);
    }
}
