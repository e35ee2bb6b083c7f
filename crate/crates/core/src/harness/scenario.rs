//! Scenario files and the particle generators they list.

use super::strategy::StrategySpec;
use crate::error::{Error, Result};
use crate::params::SimulationParams;
use crate::particles::{Layout, Particle, ParticleSet, ParticleTypeInfo};
use crate::tuning::TuningSettings;
use crate::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Axis-aligned box `[min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Vec3,
    pub max: Vec3,
}

impl Region {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Region { min, max }
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1] * e[2]
    }

    fn check(&self, domain: Vec3) -> Result<()> {
        for d in 0..3 {
            if !(self.min[d] >= 0.0 && self.min[d] < self.max[d] && self.max[d] <= domain[d]) {
                return Err(Error::Scenario(format!(
                    "region {:?}..{:?} is empty or leaves the domain {:?}",
                    self.min.0, self.max.0, domain.0
                )));
            }
        }
        Ok(())
    }
}

fn default_stddev() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `count` points uniform in `region` (default: the domain).
    Uniform {
        count: usize,
        #[serde(default)]
        region: Option<Region>,
        #[serde(default)]
        type_id: u32,
    },
    /// Cluster centres uniform in `region`, points normal around them and
    /// clipped to the domain.
    Gaussians {
        clusters: usize,
        per_cluster: usize,
        #[serde(default = "default_stddev")]
        stddev: f64,
        #[serde(default)]
        region: Option<Region>,
        #[serde(default)]
        type_id: u32,
    },
    /// Hexagonal close packing with nearest-neighbour distance `spacing`.
    HexSlab {
        spacing: f64,
        region: Region,
        #[serde(default)]
        type_id: u32,
    },
    /// Simple cubic grid through `center` intersected with a ball.
    GridSphere {
        #[serde(default)]
        center: Option<Vec3>,
        radius: f64,
        spacing: f64,
        #[serde(default)]
        type_id: u32,
    },
    Empty,
}

fn default_types() -> Vec<ParticleTypeInfo> {
    vec![ParticleTypeInfo::unit(0)]
}

fn default_cap() -> usize {
    1_000_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub params: SimulationParams,
    #[serde(default = "default_types")]
    pub types: Vec<ParticleTypeInfo>,
    #[serde(default)]
    pub initial_temperature: f64,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default = "default_cap")]
    pub particle_cap: usize,
    #[serde(default)]
    pub strategy: StrategySpec,
    #[serde(default)]
    pub tuning: TuningSettings,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, params: SimulationParams) -> Self {
        ScenarioSpec {
            name: name.into(),
            seed: 0,
            params,
            types: default_types(),
            initial_temperature: 0.0,
            generators: Vec::new(),
            particle_cap: default_cap(),
            strategy: StrategySpec::default(),
            tuning: TuningSettings::default(),
        }
    }

    pub fn with_generator(mut self, g: GeneratorSpec) -> Self {
        self.generators.push(g);
        self
    }

    /// Reads a YAML or JSON scenario. Relative model and rule paths are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut spec: ScenarioSpec = if is_json {
            serde_json::from_str(&text)?
        } else {
            serde_yaml::from_str(&text).map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?
        };
        if let Some(dir) = path.parent() {
            spec.strategy.resolve_paths(dir);
        }
        Ok(spec)
    }
}

/// Lattice points `(i, j, k) * spacing` with `|.| <= radius`.
fn sphere_offsets(radius: f64, spacing: f64) -> Vec<Vec3> {
    let n = (radius / spacing).floor() as i64;
    let limit = radius * radius * (1.0 + 1e-12);
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let v = Vec3::new(i as f64, j as f64, k as f64) * spacing;
                if v.norm2() <= limit {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Hexagonal close packing filling `region`, layers stacked along z.
fn hcp_points(region: &Region, spacing: f64) -> Vec<Vec3> {
    let r = 0.5 * spacing;
    let e = region.extent();
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let z = 2.0 * (6f64).sqrt() / 3.0 * k as f64 * r;
        if z >= e[2] {
            break;
        }
        let mut j = 0usize;
        loop {
            let y = 3f64.sqrt() * (j as f64 + (k % 2) as f64 / 3.0) * r;
            if y >= e[1] {
                break;
            }
            let mut i = 0usize;
            loop {
                let x = (2 * i + (j + k) % 2) as f64 * r;
                if x >= e[0] {
                    break;
                }
                out.push(region.min + Vec3::new(x, y, z));
                i += 1;
            }
            j += 1;
        }
        k += 1;
    }
    out
}

fn rough_count(g: &GeneratorSpec, domain: Vec3) -> Result<f64> {
    Ok(match g {
        GeneratorSpec::Uniform { count, .. } => *count as f64,
        GeneratorSpec::Gaussians { clusters, per_cluster, .. } => (*clusters * *per_cluster) as f64,
        GeneratorSpec::HexSlab { spacing, region, .. } => {
            positive_spacing(*spacing)?;
            region.check(domain)?;
            region.volume() * 2f64.sqrt() / spacing.powi(3)
        }
        GeneratorSpec::GridSphere { radius, spacing, .. } => {
            positive_spacing(*spacing)?;
            4.0 / 3.0 * std::f64::consts::PI * (radius + spacing).powi(3) / spacing.powi(3)
        }
        GeneratorSpec::Empty => 0.0,
    })
}

fn positive_spacing(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::Scenario(format!("spacing must be positive, got {s}")))
    }
}

fn clip(p: Vec3, domain: Vec3) -> Vec3 {
    let mut q = p;
    for d in 0..3 {
        q[d] = p[d].clamp(0.0, domain[d] * (1.0 - 1e-12));
    }
    q
}

fn uniform_in(rng: &mut ChaCha8Rng, region: &Region) -> Vec3 {
    let mut p = Vec3::ZERO;
    for d in 0..3 {
        p[d] = rng.random_range(region.min[d]..region.max[d]);
    }
    p
}

/// Positions produced by one generator.
pub fn generate_positions(g: &GeneratorSpec, domain: Vec3, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3>> {
    let whole = Region::new(Vec3::ZERO, domain);
    match g {
        GeneratorSpec::Uniform { count, region, .. } => {
            let region = region.unwrap_or(whole);
            region.check(domain)?;
            Ok((0..*count).map(|_| uniform_in(rng, &region)).collect())
        }
        GeneratorSpec::Gaussians { clusters, per_cluster, stddev, region, .. } => {
            let region = region.unwrap_or(whole);
            region.check(domain)?;
            let normal = Normal::new(0.0, *stddev)
                .map_err(|e| Error::Scenario(format!("standard deviation {stddev}: {e}")))?;
            let mut out = Vec::with_capacity(clusters * per_cluster);
            for _ in 0..*clusters {
                let c = uniform_in(rng, &region);
                for _ in 0..*per_cluster {
                    let offset = Vec3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng));
                    out.push(clip(c + offset, domain));
                }
            }
            Ok(out)
        }
        GeneratorSpec::HexSlab { spacing, region, .. } => {
            positive_spacing(*spacing)?;
            region.check(domain)?;
            Ok(hcp_points(region, *spacing))
        }
        GeneratorSpec::GridSphere { center, radius, spacing, .. } => {
            positive_spacing(*spacing)?;
            let c = center.unwrap_or(domain * 0.5);
            let points: Vec<Vec3> = sphere_offsets(*radius, *spacing).into_iter().map(|o| c + o).collect();
            if points.iter().any(|p| (0..3).any(|d| !(p[d] >= 0.0 && p[d] < domain[d]))) {
                return Err(Error::Scenario(format!("sphere of radius {radius} around {:?} leaves the domain", c.0)));
            }
            Ok(points)
        }
        GeneratorSpec::Empty => Ok(Vec::new()),
    }
}

fn type_of(g: &GeneratorSpec) -> u32 {
    match g {
        GeneratorSpec::Uniform { type_id, .. }
        | GeneratorSpec::Gaussians { type_id, .. }
        | GeneratorSpec::HexSlab { type_id, .. }
        | GeneratorSpec::GridSphere { type_id, .. } => *type_id,
        GeneratorSpec::Empty => 0,
    }
}

/// Maxwell-Boltzmann velocities at `temperature`, shifted to zero net
/// momentum and rescaled to the exact temperature.
fn thermalize(ps: &mut ParticleSet, temperature: f64, rng: &mut ChaCha8Rng) -> Result<()> {
    if ps.is_empty() || temperature <= 0.0 {
        return Ok(());
    }
    let std = Normal::new(0.0, 1.0).unwrap();
    for i in 0..ps.len() {
        let s = (temperature / ps.mass(i)).sqrt();
        ps.set_velocity(i, Vec3::new(std.sample(rng), std.sample(rng), std.sample(rng)) * s);
    }
    let total_mass: f64 = (0..ps.len()).map(|i| ps.mass(i)).sum();
    let drift = ps.total_momentum() * (1.0 / total_mass);
    for i in 0..ps.len() {
        let v = ps.velocity(i) - drift;
        ps.set_velocity(i, v);
    }
    if ps.len() > 1 {
        crate::dynamics::apply_thermostat(ps, temperature, f64::INFINITY)?;
    }
    Ok(())
}

/// Builds the particle set a scenario describes. Deterministic in `spec.seed`.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<ParticleSet> {
    let domain = spec.params.domain_size;
    let mut estimate = 0.0;
    for g in &spec.generators {
        estimate += rough_count(g, domain)?;
    }
    if estimate > 2.0 * spec.particle_cap as f64 + 1000.0 {
        return Err(Error::ParticleCap { count: estimate as usize, cap: spec.particle_cap });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut particles = Vec::new();
    for g in &spec.generators {
        let t = type_of(g);
        if t as usize >= spec.types.len() {
            return Err(Error::Scenario(format!("generator uses unknown particle type {t}")));
        }
        particles.extend(generate_positions(g, domain, &mut rng)?.into_iter().map(|x| Particle::new(x, Vec3::ZERO, t)));
        if particles.len() > spec.particle_cap {
            return Err(Error::ParticleCap { count: particles.len(), cap: spec.particle_cap });
        }
    }
    let mut ps = ParticleSet::from_particles(spec.types.clone(), particles, Layout::Aos)?;
    let mut vrng = ChaCha8Rng::seed_from_u64(spec.seed);
    vrng.set_stream(1);
    thermalize(&mut ps, spec.initial_temperature, &mut vrng)?;
    Ok(ps)
}
