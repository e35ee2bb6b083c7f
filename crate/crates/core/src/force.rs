//! Force computation under a chosen [`Configuration`], with container
//! lifetime management and timing.

use crate::config::{Configuration, ContainerKind};
use crate::container::{build_verlet_lists, list_iter_forces, LinkedCells, NeighborLists, PairCounter};
use crate::error::Result;
use crate::lj::PairTable;
use crate::parallel::Workers;
use crate::params::SimulationParams;
use crate::particles::ParticleSet;
use crate::vec3::Vec3;
use std::time::Instant;

/// Wall-clock cost of one force evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub force_nanos: u64,
    /// Container build and layout conversion; zero on iterations without a rebuild.
    pub build_nanos: u64,
    pub rebuilt: bool,
}

enum Container {
    Cells(LinkedCells),
    Lists(NeighborLists),
}

/// Keeps the neighbour structure of the active configuration alive across
/// iterations and rebuilds it every `rebuild_interval` iterations, on a
/// configuration change, or on request.
pub struct ForceEngine {
    params: SimulationParams,
    table: PairTable,
    workers: Workers,
    active: Option<(Configuration, Container)>,
    since_build: usize,
    force_rebuild: bool,
}

impl ForceEngine {
    pub fn new(params: &SimulationParams, particles: &ParticleSet) -> Self {
        ForceEngine {
            params: params.clone(),
            table: PairTable::new(particles.types()),
            workers: Workers::new(params.thread_count),
            active: None,
            since_build: 0,
            force_rebuild: true,
        }
    }

    pub fn workers(&self) -> &Workers {
        &self.workers
    }

    pub fn set_threads(&mut self, threads: usize) {
        if threads != self.workers.threads() {
            self.workers = Workers::new(threads);
            self.params.thread_count = threads;
        }
    }

    /// The configuration whose container is currently built.
    pub fn active_configuration(&self) -> Option<Configuration> {
        self.active.as_ref().map(|(c, _)| *c)
    }

    /// Makes the next computation rebuild its container.
    pub fn request_rebuild(&mut self) {
        self.force_rebuild = true;
    }

    /// Computes forces with `config` and stores them in `particles`, converting
    /// the particle layout if needed.
    pub fn compute(&mut self, particles: &mut ParticleSet, config: Configuration) -> Result<Timings> {
        self.compute_counted(particles, config, &())
    }

    /// Like [`ForceEngine::compute`], also reporting every force evaluation
    /// inside the cutoff to `counter`.
    pub fn compute_counted<C: PairCounter>(
        &mut self,
        particles: &mut ParticleSet,
        config: Configuration,
        counter: &C,
    ) -> Result<Timings> {
        config.validate()?;
        let mut timings = Timings::default();
        let rebuild = self.force_rebuild
            || self.active_configuration() != Some(config)
            || self.since_build >= self.params.rebuild_interval;
        if rebuild {
            let start = Instant::now();
            particles.convert_layout(config.layout);
            let container = match config.container {
                ContainerKind::LinkedCells => {
                    Container::Cells(LinkedCells::build(particles, &self.params, config.csf.value(), config.layout))
                }
                ContainerKind::VerletLists => Container::Lists(build_verlet_lists(particles, &self.params, false)),
            };
            self.active = Some((config, container));
            self.since_build = 0;
            self.force_rebuild = false;
            timings.build_nanos = elapsed(start);
            timings.rebuilt = true;
        }

        let start = Instant::now();
        let (_, container) = self.active.as_mut().unwrap();
        let forces = match container {
            Container::Cells(lc) => {
                if !rebuild {
                    lc.refresh(particles);
                }
                lc.compute(&self.workers, config.traversal, config.newton3, &self.table, self.params.cutoff, counter)
            }
            Container::Lists(lists) => list_iter_forces(lists, particles, &self.params, &self.workers, &self.table, counter),
        };
        particles.store_forces(&forces);
        timings.force_nanos = elapsed(start);
        self.since_build += 1;
        Ok(timings)
    }
}

fn elapsed(start: Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// One-shot force computation with a freshly built container. Returns the
/// forces in particle order; `particles` itself is left untouched.
pub fn compute_forces(particles: &ParticleSet, config: Configuration, params: &SimulationParams) -> Result<(Vec<Vec3>, Timings)> {
    let mut work = particles.clone();
    let mut engine = ForceEngine::new(params, &work);
    let timings = engine.compute(&mut work, config)?;
    Ok((work.forces(), timings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::enumerate_configurations;
    use crate::params::Boundary;
    use crate::particles::{Layout, Particle, ParticleTypeInfo};

    fn pair(r: f64) -> ParticleSet {
        ParticleSet::from_particles(
            vec![ParticleTypeInfo::unit(0)],
            [
                Particle::new(Vec3::new(5.0, 5.0, 5.0), Vec3::ZERO, 0),
                Particle::new(Vec3::new(5.0 + r, 5.0, 5.0), Vec3::ZERO, 0),
            ],
            Layout::Aos,
        )
        .unwrap()
    }

    #[test]
    fn pair_at_minimum_has_zero_force_everywhere() {
        let params = SimulationParams::cube(12.0, Boundary::Reflective);
        for c in enumerate_configurations() {
            let (f, _) = compute_forces(&pair(2f64.powf(1.0 / 6.0)), c, &params).unwrap();
            assert!(f.iter().all(|f| f.norm() < 1e-12), "{c}");
        }
    }

    #[test]
    fn rebuild_rule() {
        let params = SimulationParams::cube(12.0, Boundary::Reflective);
        let mut ps = pair(1.5);
        let mut engine = ForceEngine::new(&params, &ps);
        let space = enumerate_configurations();
        let mut builds = 0;
        for i in 0..25 {
            let t = engine.compute(&mut ps, space[3]).unwrap();
            if t.rebuilt {
                assert_eq!(i % 10, 0);
                builds += 1;
            }
        }
        // R = 10: builds at 0, 10, 20
        assert_eq!(builds, 3);
        engine.compute(&mut ps, space[29]).unwrap();
        assert_eq!(engine.active_configuration(), Some(space[29]));
        assert_eq!(ps.layout(), Layout::Soa);
    }
}
