//! The three production scenarios, shrinkable to desk size.

use super::run::{run_simulation, RunOptions};
use super::scenario::{GeneratorSpec, Region, ScenarioSpec};
use super::strategy::StrategySpec;
use crate::config::enumerate_configurations;
use crate::error::{Error, Result};
use crate::params::{Boundary, SimulationParams, ThermostatParams};
use crate::particles::ParticleTypeInfo;
use crate::sim::{SimulationReport, TimingSource};
use crate::tuning::TuningSettings;
use crate::vec3::Vec3;
use serde::Serialize;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    HeatingSphere,
    ExplodingLiquid,
    RayleighTaylor,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::HeatingSphere => "heating-sphere",
            Experiment::ExplodingLiquid => "exploding-liquid",
            Experiment::RayleighTaylor => "rayleigh-taylor",
        })
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heating-sphere" => Ok(Experiment::HeatingSphere),
            "exploding-liquid" => Ok(Experiment::ExplodingLiquid),
            "rayleigh-taylor" => Ok(Experiment::RayleighTaylor),
            other => Err(Error::Scenario(format!(
                "unknown experiment `{other}`; expected heating-sphere, exploding-liquid or rayleigh-taylor"
            ))),
        }
    }
}

#[derive(Clone)]
pub struct ExperimentOptions {
    /// Particle counts and iterations are multiplied by `scale`, lengths by
    /// its cube root.
    pub scale: f64,
    pub iterations: Option<usize>,
    pub seed: u64,
    pub thread_count: usize,
    pub tuning: TuningSettings,
    /// Also run every configuration as a fixed choice.
    pub baseline_sweep: bool,
    /// Wall-clock limit for each baseline run.
    pub baseline_budget: Option<Duration>,
    pub timing: TimingSource,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            scale: 1.0,
            iterations: None,
            seed: 1,
            thread_count: 1,
            tuning: TuningSettings::default(),
            baseline_sweep: false,
            baseline_budget: None,
            timing: TimingSource::WallClock,
        }
    }
}

/// Smallest lattice sphere with at least `target` points.
fn sphere_radius_for(target: usize, spacing: f64) -> f64 {
    let mut m = 0u64;
    loop {
        let r = spacing * (m as f64).sqrt();
        let n = (m as f64).sqrt().floor() as i64;
        let mut count = 0usize;
        for i in -n..=n {
            for j in -n..=n {
                for k in -n..=n {
                    if (i * i + j * j + k * k) as u64 <= m {
                        count += 1;
                    }
                }
            }
        }
        if count >= target {
            return r;
        }
        m += 1;
    }
}

fn scaled_iterations(full: usize, opts: &ExperimentOptions) -> usize {
    opts.iterations.unwrap_or_else(|| ((full as f64 * opts.scale).round() as usize).max(1))
}

/// Scenario of an experiment at the requested scale.
pub fn experiment_scenario(exp: Experiment, opts: &ExperimentOptions) -> Result<ScenarioSpec> {
    if !(opts.scale > 0.0 && opts.scale <= 1.0) {
        return Err(Error::Scenario(format!("scale must lie in (0, 1], got {}", opts.scale)));
    }
    let c = opts.scale.cbrt();
    let count = |n: f64| ((n * opts.scale).round() as usize).max(1);
    let mut spec = match exp {
        Experiment::HeatingSphere => {
            let edge = 200.0 * c;
            let mut params = SimulationParams::cube(edge, Boundary::Reflective);
            params.skin = 0.5;
            params.rebuild_interval = 10;
            params.delta_t = 1e-4;
            params.total_iterations = scaled_iterations(150_000, opts);
            params.thermostat = Some(ThermostatParams { target_temperature: 100.0, max_delta_t: 0.1, interval_iterations: 100 });
            let spacing = 2f64.powf(1.0 / 6.0);
            let radius = sphere_radius_for(count(5497.0), spacing);
            let mut s = ScenarioSpec::new(exp.to_string(), params);
            s.initial_temperature = 0.1;
            s.with_generator(GeneratorSpec::GridSphere { center: None, radius, spacing, type_id: 0 })
        }
        Experiment::ExplodingLiquid => {
            let domain = Vec3::new(120.0, 480.0, 120.0) * c;
            let slab = Vec3::new(120.0, 18.0, 120.0) * c;
            let mut params = SimulationParams::cube(1.0, Boundary::Periodic);
            params.domain_size = domain;
            params.skin = 0.6;
            params.rebuild_interval = 10;
            params.delta_t = 1e-3;
            params.total_iterations = scaled_iterations(100_000, opts);
            let lo_y = 0.5 * (domain[1] - slab[1]);
            let hi_y = lo_y + slab[1];
            let gap = 0.5;
            let below = Region::new(Vec3::ZERO, Vec3::new(domain[0], lo_y - gap, domain[2]));
            let above = Region::new(Vec3::new(0.0, hi_y + gap, 0.0), domain);
            let side = count(100.0);
            let mut s = ScenarioSpec::new(exp.to_string(), params);
            s.generators = vec![
                GeneratorSpec::HexSlab {
                    spacing: 1.0,
                    region: Region::new(Vec3::new(0.0, lo_y, 0.0), Vec3::new(domain[0], hi_y, domain[2])),
                    type_id: 0,
                },
                GeneratorSpec::Uniform { count: side, region: Some(below), type_id: 0 },
                GeneratorSpec::Uniform { count: side, region: Some(above), type_id: 0 },
            ];
            s
        }
        Experiment::RayleighTaylor => {
            let layer = Vec3::new(60.0, 60.0, 30.0) * c;
            let domain = Vec3::new(layer[0], layer[1], 2.0 * layer[2]);
            let mut params = SimulationParams::cube(1.0, Boundary::Periodic);
            params.domain_size = domain;
            params.boundary = [Boundary::Periodic, Boundary::Periodic, Boundary::Reflective];
            params.skin = 0.3;
            params.rebuild_interval = 30;
            params.delta_t = 5e-4;
            params.total_iterations = scaled_iterations(50_000, opts);
            params.gravity = Some(Vec3::new(0.0, 0.0, -12.44));
            let mut s = ScenarioSpec::new(exp.to_string(), params);
            s.types = vec![ParticleTypeInfo::unit(0), ParticleTypeInfo { type_id: 1, epsilon: 1.0, sigma: 0.5, mass: 2.0 }];
            s.generators = vec![
                GeneratorSpec::HexSlab { spacing: 1.122, region: Region::new(Vec3::ZERO, layer), type_id: 0 },
                GeneratorSpec::HexSlab {
                    spacing: 0.6,
                    region: Region::new(Vec3::new(0.0, 0.0, layer[2] + 0.5), domain),
                    type_id: 1,
                },
            ];
            s
        }
    };
    spec.seed = opts.seed;
    spec.tuning = opts.tuning;
    spec.params.thread_count = opts.thread_count;
    spec.particle_cap = usize::MAX;
    Ok(spec)
}

/// One row of the fixed-configuration comparison.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BaselineRow {
    pub configuration: String,
    pub total_nanos: Option<u64>,
    /// `total_nanos / strategyTotal`; above 1 means the strategy was faster.
    pub speedup: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentOutcome {
    pub experiment: String,
    pub particles: usize,
    pub report: SimulationReport,
    pub baseline: Vec<BaselineRow>,
    pub best_single: Option<String>,
    /// Best fixed configuration's total over the strategy's total.
    pub speedup: Option<f64>,
}

impl ExperimentOutcome {
    pub fn write_comparison(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.baseline {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs an experiment under `strategy`, optionally followed by the sweep of
/// fixed configurations.
pub fn run_experiment(exp: Experiment, strategy: &StrategySpec, opts: &ExperimentOptions) -> Result<ExperimentOutcome> {
    let spec = experiment_scenario(exp, opts)?;
    let particles = super::scenario::generate_scenario(&spec)?.len();
    let run_opts = RunOptions { timing: opts.timing.clone(), budget: None };
    let report = run_simulation(&spec, strategy, &run_opts)?;
    let strategy_total = report.total_nanos();
    let mut baseline = Vec::new();
    if opts.baseline_sweep {
        let fixed_run = match strategy {
            StrategySpec::Fixed { configuration } => Some(*configuration),
            _ => None,
        };
        let budget = RunOptions { timing: opts.timing.clone(), budget: opts.baseline_budget };
        for config in enumerate_configurations() {
            let r = if fixed_run == Some(config) {
                report.clone()
            } else {
                run_simulation(&spec, &StrategySpec::Fixed { configuration: config }, &budget)?
            };
            let row = match &r.error {
                Some(e) => BaselineRow { configuration: config.to_string(), total_nanos: None, speedup: None, error: Some(e.clone()) },
                None => {
                    let t = r.total_nanos();
                    BaselineRow {
                        configuration: config.to_string(),
                        total_nanos: Some(t),
                        speedup: (strategy_total > 0).then(|| t as f64 / strategy_total as f64),
                        error: None,
                    }
                }
            };
            log::info!("baseline {config}: {:?}", row.total_nanos);
            baseline.push(row);
        }
    }
    let best = baseline
        .iter()
        .filter_map(|r| r.total_nanos.map(|t| (r.configuration.clone(), t)))
        .min_by_key(|(_, t)| *t);
    let speedup = best.as_ref().filter(|_| strategy_total > 0).map(|(_, t)| *t as f64 / strategy_total as f64);
    Ok(ExperimentOutcome {
        experiment: exp.to_string(),
        particles,
        report,
        baseline,
        best_single: best.map(|b| b.0),
        speedup,
    })
}
