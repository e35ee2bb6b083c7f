//! Cell-grid geometry and the linked-cells binning with periodic halo images.

use crate::params::SimulationParams;
use crate::particles::ParticleSet;
use crate::vec3::Vec3;

/// Shape of a cell grid over the domain `[0, L)^3`.
///
/// Owned cells have coordinates `0..n` per axis. Periodic axes carry `halo`
/// extra layers on each side holding shifted images of boundary particles.
#[derive(Clone, Debug, PartialEq)]
pub struct GridGeometry {
    pub cells_per_dim: [usize; 3],
    pub cell_length: Vec3,
    /// Number of cells a partner within the interaction length can be away.
    pub overlap: [usize; 3],
    pub halo: [usize; 3],
    pub domain: Vec3,
}

impl GridGeometry {
    /// `floor(L / (csf * (r_c + skin)))` cells per axis (at least one),
    /// stretched to tile the domain exactly.
    pub fn new(params: &SimulationParams, csf: f64) -> Self {
        let reach = params.interaction_length();
        let target = csf * reach;
        let mut cells_per_dim = [1; 3];
        let mut cell_length = Vec3::ZERO;
        let mut overlap = [1; 3];
        let mut halo = [0; 3];
        for d in 0..3 {
            let l = params.domain_size[d];
            let n = ((l / target).floor() as usize).max(1);
            cells_per_dim[d] = n;
            cell_length[d] = l / n as f64;
            // tolerate round-off when the reach is an exact multiple of the cell edge
            overlap[d] = ((reach / cell_length[d]) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            if params.is_periodic(d) {
                halo[d] = overlap[d];
            }
        }
        GridGeometry { cells_per_dim, cell_length, overlap, halo, domain: params.domain_size }
    }

    pub fn ext_dims(&self) -> [usize; 3] {
        [
            self.cells_per_dim[0] + 2 * self.halo[0],
            self.cells_per_dim[1] + 2 * self.halo[1],
            self.cells_per_dim[2] + 2 * self.halo[2],
        ]
    }

    pub fn num_cells(&self) -> usize {
        let e = self.ext_dims();
        e[0] * e[1] * e[2]
    }

    pub fn num_owned_cells(&self) -> usize {
        self.cells_per_dim.iter().product()
    }

    /// Linear index of a cell given in owned coordinates (may be negative or
    /// `>= n` inside the halo). `None` outside the extended grid.
    #[inline]
    pub fn index(&self, c: [isize; 3]) -> Option<usize> {
        let e = self.ext_dims();
        let mut idx = 0usize;
        for d in (0..3).rev() {
            let shifted = c[d] + self.halo[d] as isize;
            if shifted < 0 || shifted >= e[d] as isize {
                return None;
            }
            idx = idx * e[d] + shifted as usize;
        }
        Some(idx)
    }

    /// Owned coordinates of the cell containing `x`, clamped into the domain.
    #[inline]
    pub fn owned_coords(&self, x: Vec3) -> [isize; 3] {
        let mut c = [0isize; 3];
        for d in 0..3 {
            let n = self.cells_per_dim[d] as isize;
            let k = (x[d] / self.cell_length[d]).floor() as isize;
            c[d] = k.clamp(0, n - 1);
        }
        c
    }

    /// Smallest possible distance between points of two cells `delta` apart.
    pub fn min_cell_distance2(&self, delta: [isize; 3]) -> f64 {
        (0..3)
            .map(|d| {
                let gap = (delta[d].unsigned_abs() as f64 - 1.0).max(0.0) * self.cell_length[d];
                gap * gap
            })
            .sum()
    }

    /// Whether cells `delta` apart can hold a pair within `reach`.
    pub fn within_reach(&self, delta: [isize; 3], reach: f64) -> bool {
        self.min_cell_distance2(delta) <= reach * reach * (1.0 + 1e-12)
    }

    pub fn halo_faces(&self) -> [[bool; 2]; 3] {
        [0, 1, 2].map(|d| [self.halo[d] > 0; 2])
    }
}

/// Linked cells: particles bucketed into cells, stored cell by cell.
///
/// Slot `s` belongs to the cell `c` with `cell_start[c] <= s < cell_start[c + 1]`
/// and refers to particle `slot_owner[s]` displaced by `slot_shift[s]`. Real
/// particles have zero shift and live in owned cells; halo cells hold periodic
/// images.
#[derive(Clone, Debug)]
pub struct CellGrid {
    pub geometry: GridGeometry,
    pub cell_start: Vec<usize>,
    pub slot_owner: Vec<u32>,
    pub slot_shift: Vec<Vec3>,
}

impl CellGrid {
    pub fn num_cells(&self) -> usize {
        self.cell_start.len() - 1
    }

    pub fn num_slots(&self) -> usize {
        self.slot_owner.len()
    }

    #[inline]
    pub fn cell_range(&self, cell: usize) -> std::ops::Range<usize> {
        self.cell_start[cell]..self.cell_start[cell + 1]
    }

    /// Owners of the particles (or images) held by `cell`.
    pub fn cell_particles(&self, cell: usize) -> &[u32] {
        &self.slot_owner[self.cell_range(cell)]
    }

    pub fn is_ghost(&self, slot: usize) -> bool {
        self.slot_shift[slot] != Vec3::ZERO
    }
}

/// Bins `particles` into a grid with cell size factor `csf`, adding periodic
/// halo images on periodic axes.
pub fn build_linked_cells(particles: &ParticleSet, params: &SimulationParams, csf: f64) -> CellGrid {
    let geometry = GridGeometry::new(params, csf);
    let positions: Vec<Vec3> = (0..particles.len()).map(|i| particles.position(i)).collect();
    bin_positions(geometry, &positions)
}

pub(crate) fn bin_positions(geometry: GridGeometry, positions: &[Vec3]) -> CellGrid {
    struct Entry {
        coords: [isize; 3],
        owner: u32,
        shift: Vec3,
    }
    let mut entries: Vec<Entry> = positions
        .iter()
        .enumerate()
        .map(|(i, &x)| Entry { coords: geometry.owned_coords(x), owner: i as u32, shift: Vec3::ZERO })
        .collect();

    // axes in turn so that edge and corner images are images of images
    for d in 0..3 {
        let o = geometry.halo[d] as isize;
        if o == 0 {
            continue;
        }
        let n = geometry.cells_per_dim[d] as isize;
        let l = geometry.domain[d];
        let existing = entries.len();
        for e in 0..existing {
            let c = entries[e].coords[d];
            if c < o {
                let mut coords = entries[e].coords;
                coords[d] += n;
                let mut shift = entries[e].shift;
                shift[d] += l;
                entries.push(Entry { coords, owner: entries[e].owner, shift });
            }
            if c >= n - o {
                let mut coords = entries[e].coords;
                coords[d] -= n;
                let mut shift = entries[e].shift;
                shift[d] -= l;
                entries.push(Entry { coords, owner: entries[e].owner, shift });
            }
        }
    }

    // counting sort by cell
    let num_cells = geometry.num_cells();
    let cell_of: Vec<usize> = entries
        .iter()
        .map(|e| geometry.index(e.coords).expect("image outside halo"))
        .collect();
    let mut cell_start = vec![0usize; num_cells + 1];
    for &c in &cell_of {
        cell_start[c + 1] += 1;
    }
    for c in 0..num_cells {
        cell_start[c + 1] += cell_start[c];
    }
    let mut cursor = cell_start.clone();
    let mut slot_owner = vec![0u32; entries.len()];
    let mut slot_shift = vec![Vec3::ZERO; entries.len()];
    for (e, &c) in entries.iter().zip(&cell_of) {
        let s = cursor[c];
        cursor[c] += 1;
        slot_owner[s] = e.owner;
        slot_shift[s] = e.shift;
    }
    CellGrid { geometry, cell_start, slot_owner, slot_shift }
}
