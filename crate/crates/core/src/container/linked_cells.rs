use super::grid::{build_linked_cells, CellGrid};
use super::kernel::{AosSink, AosSlot, Kernel, PairCounter, SoaSink, SoaSlots};
use super::traversal::{Schedule, Steps};
use crate::config::TraversalKind;
use crate::lj::PairTable;
use crate::parallel::{SharedMut, Workers};
use crate::params::SimulationParams;
use crate::particles::{Layout, ParticleSet};
use crate::vec3::Vec3;

enum Buffers {
    Aos { slots: Vec<AosSlot>, force: Vec<Vec3> },
    Soa { slots: SoaSlots, force: [Vec<f64>; 3] },
}

/// Linked-cells container: a [`CellGrid`] plus cell-ordered copies of the
/// particle data in the configured layout.
pub struct LinkedCells {
    grid: CellGrid,
    buffers: Buffers,
    /// Positions at build time, for unwrapping periodic moves between rebuilds.
    build_pos: Vec<Vec3>,
    periodic: [bool; 3],
    reach: f64,
    /// Schedule of the last traversal run, with its active cells for this build.
    schedule: Option<(TraversalKind, usize, Schedule, Steps)>,
}

impl LinkedCells {
    pub fn build(particles: &ParticleSet, params: &SimulationParams, csf: f64, layout: Layout) -> Self {
        let grid = build_linked_cells(particles, params, csf);
        let slots = grid.num_slots();
        let buffers = match layout {
            Layout::Aos => Buffers::Aos { slots: vec![AosSlot::default(); slots], force: vec![Vec3::ZERO; slots] },
            Layout::Soa => Buffers::Soa {
                slots: SoaSlots { x: vec![0.0; slots], y: vec![0.0; slots], z: vec![0.0; slots], ty: vec![0; slots] },
                force: [vec![0.0; slots], vec![0.0; slots], vec![0.0; slots]],
            },
        };
        let mut lc = LinkedCells {
            grid,
            buffers,
            build_pos: particles.positions(),
            periodic: [0, 1, 2].map(|d| params.is_periodic(d)),
            reach: params.interaction_length(),
            schedule: None,
        };
        lc.refresh(particles);
        lc
    }

    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    /// Copies current positions into the cell-ordered buffer, including
    /// periodic images.
    pub fn refresh(&mut self, particles: &ParticleSet) {
        let domain = self.grid.geometry.domain;
        let mut effective = Vec::with_capacity(particles.len());
        for i in 0..particles.len() {
            let mut x = particles.position(i);
            for d in 0..3 {
                if self.periodic[d] {
                    x[d] -= domain[d] * ((x[d] - self.build_pos[i][d]) / domain[d]).round();
                }
            }
            effective.push(x);
        }
        let grid = &self.grid;
        match &mut self.buffers {
            Buffers::Aos { slots, .. } => {
                for (s, slot) in slots.iter_mut().enumerate() {
                    let owner = grid.slot_owner[s] as usize;
                    slot.pos = effective[owner] + grid.slot_shift[s];
                    slot.ty = particles.type_id(owner);
                }
            }
            Buffers::Soa { slots, .. } => {
                for s in 0..grid.num_slots() {
                    let owner = grid.slot_owner[s] as usize;
                    let x = effective[owner] + grid.slot_shift[s];
                    slots.x[s] = x[0];
                    slots.y[s] = x[1];
                    slots.z[s] = x[2];
                    slots.ty[s] = particles.type_id(owner);
                }
            }
        }
    }

    /// Runs `traversal` and returns the force on every particle.
    pub fn compute<C: PairCounter>(
        &mut self,
        workers: &Workers,
        traversal: TraversalKind,
        newton3: bool,
        table: &PairTable,
        cutoff: f64,
        counter: &C,
    ) -> Vec<Vec3> {
        let fresh = matches!(&self.schedule, Some((t, w, ..)) if *t == traversal && *w == workers.threads());
        if !fresh {
            let geom = &self.grid.geometry;
            let s = Schedule::new(geom, traversal, self.reach, workers.threads());
            let occupied: Vec<usize> = (0..self.grid.num_cells()).filter(|&c| !self.grid.cell_range(c).is_empty()).collect();
            let steps = s.steps(geom, &occupied);
            self.schedule = Some((traversal, workers.threads(), s, steps));
        }
        let (_, _, schedule, steps) = self.schedule.as_ref().unwrap();
        let grid = &self.grid;
        let cell_range = |c: usize| grid.cell_range(c);
        let cutoff2 = cutoff * cutoff;
        let n_particles = self.build_pos.len();
        let mut out = vec![Vec3::ZERO; n_particles];
        match &mut self.buffers {
            Buffers::Aos { slots, force } => {
                force.iter_mut().for_each(|f| *f = Vec3::ZERO);
                let sink = AosSink(SharedMut::new(force));
                let kernel = Kernel { slots: slots.as_slice(), sink: &sink, table, cutoff2, counter };
                // SAFETY: the schedule never lets two workers write the same cell.
                unsafe { schedule.run(steps, &grid.geometry, workers, &kernel, newton3, cell_range) };
                for (s, f) in force.iter().enumerate() {
                    out[grid.slot_owner[s] as usize] += *f;
                }
            }
            Buffers::Soa { slots, force } => {
                force.iter_mut().for_each(|c| c.iter_mut().for_each(|f| *f = 0.0));
                let [fx, fy, fz] = force;
                let sink = SoaSink([SharedMut::new(fx), SharedMut::new(fy), SharedMut::new(fz)]);
                let kernel = Kernel { slots: &*slots, sink: &sink, table, cutoff2, counter };
                // SAFETY: as above.
                unsafe { schedule.run(steps, &grid.geometry, workers, &kernel, newton3, cell_range) };
                for s in 0..grid.num_slots() {
                    out[grid.slot_owner[s] as usize] += Vec3([fx[s], fy[s], fz[s]]);
                }
            }
        }
        out
    }
}
