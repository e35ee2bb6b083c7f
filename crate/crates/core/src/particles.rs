//! Particle storage in array-of-structures or structure-of-arrays layout.
//!
//! A [`ParticleSet`] owns the per-particle state (position, velocity, force,
//! force of the previous step, species) together with the table of species
//! parameters. The physical layout can be switched at any time without loss;
//! the force kernels read positions through the active layout.

use crate::error::{Error, Result};
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Lennard-Jones parameters of one particle species, in reduced units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ParticleTypeInfo {
    pub type_id: u32,
    pub epsilon: f64,
    pub sigma: f64,
    pub mass: f64,
}

impl ParticleTypeInfo {
    pub fn new(type_id: u32, epsilon: f64, sigma: f64, mass: f64) -> Result<Self> {
        let info = ParticleTypeInfo { type_id, epsilon, sigma, mass };
        info.validate()?;
        Ok(info)
    }

    /// The regular Lennard-Jones molecule: epsilon = sigma = mass = 1.
    pub fn unit(type_id: u32) -> Self {
        ParticleTypeInfo { type_id, epsilon: 1.0, sigma: 1.0, mass: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.epsilon) && ok(self.sigma) && ok(self.mass) {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "particle type {} needs positive epsilon, sigma and mass",
                self.type_id
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layout {
    Aos,
    Soa,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Aos => "AoS",
            Layout::Soa => "SoA",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub position: Vec3,
    pub velocity: Vec3,
    pub force: Vec3,
    pub old_force: Vec3,
    pub type_id: u32,
}

impl Particle {
    pub fn new(position: Vec3, velocity: Vec3, type_id: u32) -> Self {
        Particle { position, velocity, type_id, ..Default::default() }
    }
}

/// Every attribute stored contiguously, one array per component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SoaParticles {
    pub pos: [Vec<f64>; 3],
    pub vel: [Vec<f64>; 3],
    pub force: [Vec<f64>; 3],
    pub old_force: [Vec<f64>; 3],
    pub type_id: Vec<u32>,
}

impl SoaParticles {
    fn len(&self) -> usize {
        self.type_id.len()
    }

    fn push(&mut self, p: &Particle) {
        for d in 0..3 {
            self.pos[d].push(p.position[d]);
            self.vel[d].push(p.velocity[d]);
            self.force[d].push(p.force[d]);
            self.old_force[d].push(p.old_force[d]);
        }
        self.type_id.push(p.type_id);
    }

    fn get(&self, i: usize) -> Particle {
        let pick = |a: &[Vec<f64>; 3]| Vec3([a[0][i], a[1][i], a[2][i]]);
        Particle {
            position: pick(&self.pos),
            velocity: pick(&self.vel),
            force: pick(&self.force),
            old_force: pick(&self.old_force),
            type_id: self.type_id[i],
        }
    }

    #[inline]
    pub fn position(&self, i: usize) -> Vec3 {
        Vec3([self.pos[0][i], self.pos[1][i], self.pos[2][i]])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    Aos(Vec<Particle>),
    Soa(SoaParticles),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSet {
    storage: Storage,
    types: Vec<ParticleTypeInfo>,
}

macro_rules! vec_accessors {
    ($get:ident, $set:ident, $field:ident, $soa:ident) => {
        #[inline]
        pub fn $get(&self, i: usize) -> Vec3 {
            match &self.storage {
                Storage::Aos(v) => v[i].$field,
                Storage::Soa(s) => Vec3([s.$soa[0][i], s.$soa[1][i], s.$soa[2][i]]),
            }
        }

        #[inline]
        pub fn $set(&mut self, i: usize, value: Vec3) {
            match &mut self.storage {
                Storage::Aos(v) => v[i].$field = value,
                Storage::Soa(s) => {
                    s.$soa[0][i] = value[0];
                    s.$soa[1][i] = value[1];
                    s.$soa[2][i] = value[2];
                }
            }
        }
    };
}

impl ParticleSet {
    /// Creates an empty set. Species are looked up by `type_id`, which must
    /// equal the species' index in `types`.
    pub fn new(types: Vec<ParticleTypeInfo>, layout: Layout) -> Result<Self> {
        for (i, t) in types.iter().enumerate() {
            t.validate()?;
            if t.type_id as usize != i {
                return Err(Error::InvalidParams(format!(
                    "particle type at index {i} has id {}",
                    t.type_id
                )));
            }
        }
        let storage = match layout {
            Layout::Aos => Storage::Aos(Vec::new()),
            Layout::Soa => Storage::Soa(SoaParticles::default()),
        };
        Ok(ParticleSet { storage, types })
    }

    pub fn from_particles(
        types: Vec<ParticleTypeInfo>,
        particles: impl IntoIterator<Item = Particle>,
        layout: Layout,
    ) -> Result<Self> {
        let mut set = ParticleSet::new(types, layout)?;
        for p in particles {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: Particle) -> Result<()> {
        if p.type_id as usize >= self.types.len() {
            return Err(Error::InvalidParams(format!("unknown particle type {}", p.type_id)));
        }
        match &mut self.storage {
            Storage::Aos(v) => v.push(p),
            Storage::Soa(s) => s.push(&p),
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.storage {
            Storage::Aos(v) => v.len(),
            Storage::Soa(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> Layout {
        match self.storage {
            Storage::Aos(_) => Layout::Aos,
            Storage::Soa(_) => Layout::Soa,
        }
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn types(&self) -> &[ParticleTypeInfo] {
        &self.types
    }

    vec_accessors!(position, set_position, position, pos);
    vec_accessors!(velocity, set_velocity, velocity, vel);
    vec_accessors!(force, set_force, force, force);
    vec_accessors!(old_force, set_old_force, old_force, old_force);

    #[inline]
    pub fn type_id(&self, i: usize) -> u32 {
        match &self.storage {
            Storage::Aos(v) => v[i].type_id,
            Storage::Soa(s) => s.type_id[i],
        }
    }

    #[inline]
    pub fn mass(&self, i: usize) -> f64 {
        self.types[self.type_id(i) as usize].mass
    }

    pub fn particle(&self, i: usize) -> Particle {
        match &self.storage {
            Storage::Aos(v) => v[i],
            Storage::Soa(s) => s.get(i),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Particle> + '_ {
        (0..self.len()).map(move |i| self.particle(i))
    }

    pub fn positions(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.position(i)).collect()
    }

    pub fn forces(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.force(i)).collect()
    }

    /// Overwrites all forces. `forces` must have one entry per particle.
    pub fn store_forces(&mut self, forces: &[Vec3]) {
        assert_eq!(forces.len(), self.len());
        match &mut self.storage {
            Storage::Aos(v) => {
                for (p, f) in v.iter_mut().zip(forces) {
                    p.force = *f;
                }
            }
            Storage::Soa(s) => {
                for d in 0..3 {
                    for (dst, f) in s.force[d].iter_mut().zip(forces) {
                        *dst = f[d];
                    }
                }
            }
        }
    }

    /// Copies the current forces into `old_force`.
    pub fn shift_forces(&mut self) {
        match &mut self.storage {
            Storage::Aos(v) => v.iter_mut().for_each(|p| p.old_force = p.force),
            Storage::Soa(s) => {
                for d in 0..3 {
                    s.old_force[d].copy_from_slice(&s.force[d]);
                }
            }
        }
    }

    pub fn total_momentum(&self) -> Vec3 {
        let mut p = Vec3::ZERO;
        for i in 0..self.len() {
            p += self.velocity(i) * self.mass(i);
        }
        p
    }

    pub fn kinetic_energy(&self) -> f64 {
        (0..self.len()).map(|i| 0.5 * self.mass(i) * self.velocity(i).norm2()).sum()
    }

    /// Switches the physical layout in place. A no-op if already in `target`.
    pub fn convert_layout(&mut self, target: Layout) {
        if self.layout() == target {
            return;
        }
        let storage = std::mem::replace(&mut self.storage, Storage::Aos(Vec::new()));
        self.storage = match storage {
            Storage::Aos(v) => {
                let mut soa = SoaParticles::default();
                for p in &v {
                    soa.push(p);
                }
                Storage::Soa(soa)
            }
            Storage::Soa(s) => Storage::Aos((0..s.len()).map(|i| s.get(i)).collect()),
        };
    }
}

/// Returns a copy of `particles` stored in the `target` layout.
pub fn convert_layout(particles: &ParticleSet, target: Layout) -> ParticleSet {
    let mut out = particles.clone();
    out.convert_layout(target);
    out
}
