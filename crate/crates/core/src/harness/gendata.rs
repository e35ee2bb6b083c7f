//! Training data: every configuration trialled on a sweep of synthetic
//! particle distributions, labelled with the cheapest one.

use super::scenario::{generate_scenario, GeneratorSpec, Region, ScenarioSpec};
use crate::config::{enumerate_configurations, Configuration};
use crate::error::{Error, Result};
use crate::force::ForceEngine;
use crate::forest::{write_dataset, TrainingRow};
use crate::params::{Boundary, SimulationParams};
use crate::particles::ParticleSet;
use crate::stats::compute_live_stats;
use crate::tuning::PerformanceEvidence;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Uniform,
    Gaussians,
    HexSlab,
    GridSphere,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct GenDataOptions {
    pub particle_cap: usize,
    pub threads: Vec<usize>,
    pub skins: Vec<f64>,
    pub trial_iterations: usize,
    pub rebuild_interval: usize,
    pub seed: u64,
    pub families: Vec<Family>,
    pub gaussian_per_cluster: usize,
    /// Edge of the cubic domain holding the uniform background and the slab.
    pub hex_domain: f64,
    pub sphere_domain: f64,
}

impl Default for GenDataOptions {
    fn default() -> Self {
        GenDataOptions {
            particle_cap: 10_000,
            threads: vec![1, 2, 4, 8],
            skins: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            trial_iterations: 10,
            rebuild_interval: 10,
            seed: 42,
            families: vec![Family::Uniform, Family::Gaussians, Family::HexSlab, Family::GridSphere, Family::Empty],
            gaussian_per_cluster: 50,
            hex_domain: 20.0,
            sphere_domain: 100.0,
        }
    }
}

impl GenDataOptions {
    /// Number of rows each scenario contributes.
    pub fn sweep_points(&self) -> usize {
        self.threads.len() * self.skins.len()
    }
}

fn base_params(edge: f64, rebuild_interval: usize) -> SimulationParams {
    let mut p = SimulationParams::cube(edge, Boundary::Reflective);
    p.rebuild_interval = rebuild_interval;
    p
}

/// Lattice points of a sphere, without generating them.
fn sphere_count(radius: f64, spacing: f64) -> usize {
    let n = (radius / spacing).floor() as i64;
    let limit = radius * radius * (1.0 + 1e-12);
    let mut count = 0;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                if ((i * i + j * j + k * k) as f64) * spacing * spacing <= limit {
                    count += 1;
                }
            }
        }
    }
    count
}

/// The scenario families of the sweep, shrunk to fit the particle cap.
pub fn training_scenarios(opts: &GenDataOptions) -> Vec<ScenarioSpec> {
    let mut out = Vec::new();
    let r = opts.rebuild_interval;
    let mut push = |name: String, edge: f64, gens: Vec<GeneratorSpec>| {
        let mut s = ScenarioSpec::new(name, base_params(edge, r));
        s.seed = opts.seed.wrapping_add(out.len() as u64);
        s.particle_cap = opts.particle_cap;
        s.generators = gens;
        out.push(s);
    };
    for family in &opts.families {
        match family {
            Family::Uniform => {
                let mut n = 100;
                while n <= opts.particle_cap.min(204_000) {
                    push(format!("uniform-{n}"), 20.0, vec![GeneratorSpec::Uniform { count: n, region: None, type_id: 0 }]);
                    n *= 2;
                }
            }
            Family::Gaussians => {
                let region = Region::new(Vec3::splat(0.5), Vec3::splat(16.5));
                let mut g = 10;
                while g <= 160 {
                    if g * opts.gaussian_per_cluster <= opts.particle_cap {
                        push(
                            format!("gaussians-{g}"),
                            17.0,
                            vec![GeneratorSpec::Gaussians {
                                clusters: g,
                                per_cluster: opts.gaussian_per_cluster,
                                stddev: 2.0,
                                region: Some(region),
                                type_id: 0,
                            }],
                        );
                    }
                    g *= 2;
                }
            }
            Family::HexSlab => {
                let l = opts.hex_domain;
                let background = (4000.0 * (l / 40.0).powi(3)).round() as usize;
                for quarter in 1..=4 {
                    let x = l / 8.0 * quarter as f64;
                    let lo = Vec3::new(0.5 * (l - x), 0.0, 0.0);
                    let hi = Vec3::new(0.5 * (l + x), l, l);
                    push(
                        format!("hex-slab-{x}"),
                        l,
                        vec![
                            GeneratorSpec::Uniform { count: background, region: None, type_id: 0 },
                            GeneratorSpec::HexSlab { spacing: 1.225, region: Region::new(lo, hi), type_id: 0 },
                        ],
                    );
                }
            }
            Family::GridSphere => {
                for radius in [5.0, 10.0, 15.0, 20.0] {
                    for spacing in [0.5, 1.0, 1.5, 2.0] {
                        if sphere_count(radius, spacing) <= opts.particle_cap {
                            push(
                                format!("sphere-r{radius}-s{spacing}"),
                                opts.sphere_domain,
                                vec![GeneratorSpec::GridSphere { center: None, radius, spacing, type_id: 0 }],
                            );
                        }
                    }
                }
            }
            Family::Empty => push("empty".into(), 40.0, vec![GeneratorSpec::Empty]),
        }
    }
    out
}

/// Cost of every configuration on a frozen particle state: `iterations`
/// force evaluations without moving particles, the first one rebuilding.
pub fn trial_costs(
    particles: &mut ParticleSet,
    params: &SimulationParams,
    space: &[Configuration],
    iterations: usize,
) -> Result<Vec<(Configuration, f64)>> {
    let mut out = Vec::with_capacity(space.len());
    for &config in space {
        let mut engine = ForceEngine::new(params, particles);
        let mut ev = PerformanceEvidence::new(config, 0);
        for _ in 0..iterations {
            match engine.compute(particles, config) {
                Ok(t) => ev.samples.push(t),
                Err(e) => {
                    log::warn!("{config} failed: {e}");
                    ev.failed = true;
                    break;
                }
            }
        }
        out.push((config, ev.cost(params.rebuild_interval)));
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct GenDataSummary {
    pub rows: Vec<TrainingRow>,
    pub scenarios: usize,
    /// Scenario name and the reason it was skipped.
    pub skipped: Vec<(String, String)>,
    pub elapsed: Duration,
}

fn scenario_rows(spec: &ScenarioSpec, opts: &GenDataOptions, space: &[Configuration]) -> Result<Vec<TrainingRow>> {
    let mut particles = generate_scenario(spec)?;
    let mut rows = Vec::new();
    for &skin in &opts.skins {
        for &threads in &opts.threads {
            let mut params = spec.params.clone();
            params.skin = skin;
            params.thread_count = threads;
            params.validate()?;
            let stats = compute_live_stats(&particles, &params);
            let costs = trial_costs(&mut particles, &params, space, opts.trial_iterations)?;
            let label = TrainingRow::argmin(&costs)
                .ok_or_else(|| Error::Dataset(format!("no configuration succeeded on {}", spec.name)))?;
            rows.push(TrainingRow { features: stats.features(), label, costs });
        }
    }
    Ok(rows)
}

/// Runs the sweep and collects the labelled rows. Failing scenarios are
/// logged and skipped.
pub fn generate_rows(opts: &GenDataOptions) -> GenDataSummary {
    let start = Instant::now();
    let space = enumerate_configurations();
    let scenarios = training_scenarios(opts);
    let mut summary = GenDataSummary { scenarios: scenarios.len(), ..Default::default() };
    for spec in &scenarios {
        let t = Instant::now();
        match scenario_rows(spec, opts, &space) {
            Ok(rows) => {
                log::info!("{}: {} rows in {:.1} s", spec.name, rows.len(), t.elapsed().as_secs_f64());
                summary.rows.extend(rows);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", spec.name);
                summary.skipped.push((spec.name.clone(), e.to_string()));
            }
        }
    }
    summary.elapsed = start.elapsed();
    summary
}

/// Runs the sweep and writes the dataset CSV with one audit column per
/// configuration.
pub fn generate_training_dataset(out: &Path, opts: &GenDataOptions) -> Result<GenDataSummary> {
    let summary = generate_rows(opts);
    write_dataset(out, &summary.rows, &enumerate_configurations())?;
    Ok(summary)
}
