//! Verlet neighbour lists and the `List_Iter` traversal.

use super::grid::{bin_positions, GridGeometry};
use super::kernel::{PairCounter, Slots};
use crate::lj::{force_prefactor, PairTable};
use crate::parallel::{SharedMut, Workers};
use crate::params::SimulationParams;
use crate::particles::{Particle, ParticleSet, SoaParticles, Storage};
use crate::vec3::Vec3;

/// Per-particle partner lists in compressed row form.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborLists {
    offsets: Vec<usize>,
    partners: Vec<u32>,
    pub newton3: bool,
    pub build_iteration: usize,
}

impl NeighborLists {
    pub fn num_particles(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn partners(&self, i: usize) -> &[u32] {
        &self.partners[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Total number of list entries.
    pub fn num_entries(&self) -> usize {
        self.partners.len()
    }
}

/// Lists every partner within `cutoff + skin` (nearest image on periodic axes),
/// found through a temporary cell grid with cell size factor 1. With `newton3`
/// each unordered pair is stored once, under its lower index.
pub fn build_verlet_lists(particles: &ParticleSet, params: &SimulationParams, newton3: bool) -> NeighborLists {
    let n = particles.len();
    let positions = particles.positions();
    let mut geometry = GridGeometry::new(params, 1.0);
    geometry.halo = [0; 3];
    let cells = geometry.cells_per_dim;
    let grid = bin_positions(geometry.clone(), &positions);
    let reach2 = params.interaction_length().powi(2);

    // neighbour cells of each cell, wrapping periodic axes; deduplicated because
    // small periodic grids map several offsets onto the same cell
    let o = geometry.overlap.map(|v| v as isize);
    let neighbour_cells = |c: [isize; 3]| -> Vec<usize> {
        let mut out = Vec::new();
        for dz in -o[2]..=o[2] {
            for dy in -o[1]..=o[1] {
                for dx in -o[0]..=o[0] {
                    let mut k = [c[0] + dx, c[1] + dy, c[2] + dz];
                    let mut inside = true;
                    for d in 0..3 {
                        let m = cells[d] as isize;
                        if params.is_periodic(d) {
                            k[d] = k[d].rem_euclid(m);
                        } else if k[d] < 0 || k[d] >= m {
                            inside = false;
                        }
                    }
                    if inside {
                        out.push(geometry.index(k).unwrap());
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    };

    // positions in cell order so that the pair loops stream through memory
    let slot_pos: Vec<Vec3> = grid.slot_owner.iter().map(|&i| positions[i as usize]).collect();
    let wrap = Wrap {
        periodic: [0, 1, 2].map(|d| params.is_periodic(d)),
        domain: params.domain_size,
        any: (0..3).any(|d| params.is_periodic(d)),
    };

    // every unordered pair of cells is visited once, from its lower index
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut keep = |a: usize, b: usize| {
        if wrap.apply(slot_pos[a] - slot_pos[b]).norm2() <= reach2 {
            let (i, j) = (grid.slot_owner[a], grid.slot_owner[b]);
            pairs.push((i.min(j), i.max(j)));
        }
    };
    for z in 0..cells[2] as isize {
        for y in 0..cells[1] as isize {
            for x in 0..cells[0] as isize {
                let c = geometry.index([x, y, z]).unwrap();
                let own = grid.cell_range(c);
                if own.is_empty() {
                    continue;
                }
                for k in neighbour_cells([x, y, z]) {
                    if k < c {
                        continue;
                    }
                    if k == c {
                        for a in own.clone() {
                            for b in a + 1..own.end {
                                keep(a, b);
                            }
                        }
                    } else {
                        for a in own.clone() {
                            for b in grid.cell_range(k) {
                                keep(a, b);
                            }
                        }
                    }
                }
            }
        }
    }

    // counting sort of the pairs into rows
    let mut offsets = vec![0usize; n + 1];
    for &(lo, hi) in &pairs {
        offsets[lo as usize + 1] += 1;
        if !newton3 {
            offsets[hi as usize + 1] += 1;
        }
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut partners = vec![0u32; offsets[n]];
    for &(lo, hi) in &pairs {
        partners[cursor[lo as usize]] = hi;
        cursor[lo as usize] += 1;
        if !newton3 {
            partners[cursor[hi as usize]] = lo;
            cursor[hi as usize] += 1;
        }
    }
    NeighborLists { offsets, partners, newton3, build_iteration: 0 }
}

impl Slots for [Particle] {
    #[inline(always)]
    fn pos(&self, s: usize) -> Vec3 {
        self[s].position
    }
    #[inline(always)]
    fn ty(&self, s: usize) -> u32 {
        self[s].type_id
    }
}

impl Slots for SoaParticles {
    #[inline(always)]
    fn pos(&self, s: usize) -> Vec3 {
        self.position(s)
    }
    #[inline(always)]
    fn ty(&self, s: usize) -> u32 {
        self.type_id[s]
    }
}

#[derive(Clone, Copy)]
struct Wrap {
    periodic: [bool; 3],
    domain: Vec3,
    any: bool,
}

impl Wrap {
    #[inline(always)]
    fn apply(&self, mut d: Vec3) -> Vec3 {
        if self.any {
            for k in 0..3 {
                if self.periodic[k] {
                    d[k] -= self.domain[k] * (d[k] / self.domain[k]).round();
                }
            }
        }
        d
    }
}

/// `List_Iter`: one task per particle, each accumulating only its own force.
/// Requires lists built without Newton-3.
pub fn list_iter_forces<C: PairCounter>(
    lists: &NeighborLists,
    particles: &ParticleSet,
    params: &SimulationParams,
    workers: &Workers,
    table: &PairTable,
    counter: &C,
) -> Vec<Vec3> {
    assert!(!lists.newton3, "List_Iter needs full neighbour lists");
    let wrap = Wrap {
        periodic: [0, 1, 2].map(|d| params.is_periodic(d)),
        domain: params.domain_size,
        any: (0..3).any(|d| params.is_periodic(d)),
    };
    let cutoff2 = params.cutoff * params.cutoff;
    let mut out = vec![Vec3::ZERO; particles.len()];
    let sink = SharedMut::new(&mut out);
    let indices: Vec<u32> = (0..particles.len() as u32).collect();

    fn run<S: Slots + ?Sized, C: PairCounter>(
        slots: &S,
        lists: &NeighborLists,
        indices: &[u32],
        sink: &SharedMut<Vec3>,
        workers: &Workers,
        table: &PairTable,
        cutoff2: f64,
        wrap: Wrap,
        counter: &C,
    ) {
        workers.for_each(indices, |&i| {
            let i = i as usize;
            let pi = slots.pos(i);
            let ti = slots.ty(i);
            let mut fi = Vec3::ZERO;
            let mut n = 0;
            for &j in lists.partners(i) {
                let j = j as usize;
                let d = wrap.apply(pi - slots.pos(j));
                let r2 = d.norm2();
                if r2 < cutoff2 {
                    fi += d * force_prefactor(r2, table.get(ti, slots.ty(j)));
                    n += 1;
                }
            }
            counter.add(n);
            // SAFETY: task i is the only writer of entry i.
            unsafe { *sink.get_mut(i) = fi };
        });
    }

    match particles.storage() {
        Storage::Aos(v) => run(v.as_slice(), lists, &indices, &sink, workers, table, cutoff2, wrap, counter),
        Storage::Soa(s) => run(s, lists, &indices, &sink, workers, table, cutoff2, wrap, counter),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Boundary;
    use crate::particles::{Layout, ParticleTypeInfo};

    fn set(points: &[[f64; 3]]) -> ParticleSet {
        ParticleSet::from_particles(
            vec![ParticleTypeInfo::unit(0)],
            points.iter().map(|&p| Particle::new(Vec3(p), Vec3::ZERO, 0)),
            Layout::Aos,
        )
        .unwrap()
    }

    fn params() -> SimulationParams {
        let mut p = SimulationParams::cube(20.0, Boundary::Reflective);
        p.cutoff = 3.0;
        p.skin = 0.5;
        p
    }

    #[test]
    fn single_particle_has_no_partners() {
        let l = build_verlet_lists(&set(&[[1.0, 1.0, 1.0]]), &params(), false);
        assert!(l.partners(0).is_empty());
    }

    #[test]
    fn skin_boundary_inclusive() {
        let l = build_verlet_lists(&set(&[[5.0, 5.0, 5.0], [8.4, 5.0, 5.0]]), &params(), false);
        assert_eq!(l.partners(0), &[1]);
        assert_eq!(l.partners(1), &[0]);
        let l = build_verlet_lists(&set(&[[5.0, 5.0, 5.0], [8.6, 5.0, 5.0]]), &params(), false);
        assert_eq!(l.num_entries(), 0);
    }

    #[test]
    fn newton3_lists_store_each_pair_once() {
        let pts: Vec<[f64; 3]> = (0..60).map(|i| [(i as f64 * 1.7) % 19.0, (i as f64 * 2.9) % 19.0, (i as f64 * 0.61) % 19.0]).collect();
        let full = build_verlet_lists(&set(&pts), &params(), false);
        let half = build_verlet_lists(&set(&pts), &params(), true);
        assert_eq!(full.num_entries(), 2 * half.num_entries());
    }

    #[test]
    fn periodic_pairs_use_nearest_image() {
        let mut p = params();
        p.boundary = [Boundary::Periodic; 3];
        let l = build_verlet_lists(&set(&[[0.5, 5.0, 5.0], [19.5, 5.0, 5.0]]), &p, false);
        assert_eq!(l.partners(0), &[1]);
    }
}
