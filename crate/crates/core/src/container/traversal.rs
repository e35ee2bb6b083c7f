//! Race-free parallel schedules over a cell grid.
//!
//! * `C01`: every owned cell in parallel, each computing forces on its own
//!   particles only (no Newton-3).
//! * `C08`: a base cell handles all cell pairs inside the block
//!   `[b, b + overlap]^3` whose lower corner is `b`; blocks of one colour
//!   (stride `overlap + 1`) never overlap, colours run one after another.
//! * `C18`: a base cell interacts with the forward half of its neighbourhood;
//!   colour stride `2 * overlap + 1` in x and y, `overlap + 1` in z.
//! * `SLI`: one slab of layers along the longest axis per worker, processed
//!   with the `C08` block; the layers next to a slab seam are guarded by a
//!   lock shared with the neighbouring slab.

use super::grid::GridGeometry;
use super::kernel::{ForceSink, Kernel, PairCounter, PairMode, Slots};
use crate::config::TraversalKind;
use crate::parallel::Workers;
use std::sync::Mutex;

type Offset = [isize; 3];

#[inline]
fn add(a: Offset, b: Offset) -> Offset {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Offset, b: Offset) -> Offset {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn box_offsets(lo: Offset, hi: Offset) -> Vec<Offset> {
    let mut out = Vec::new();
    for z in lo[2]..=hi[2] {
        for y in lo[1]..=hi[1] {
            for x in lo[0]..=hi[0] {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Cell pairs `(e1, e2)` inside the block whose component-wise minimum is the
/// origin. `(0, 0)` is the base cell with itself.
pub fn block_stencil(geom: &GridGeometry, reach: f64) -> Vec<(Offset, Offset)> {
    let o = geom.overlap.map(|v| v as isize);
    let cells = box_offsets([0; 3], o);
    let mut out = Vec::new();
    for (i, &e1) in cells.iter().enumerate() {
        for &e2 in &cells[i..] {
            let corner = [0, 1, 2].map(|d| e1[d].min(e2[d]));
            if corner != [0; 3] || !geom.within_reach(sub(e2, e1), reach) {
                continue;
            }
            out.push((e1, e2));
        }
    }
    out
}

/// Forward half of the neighbourhood (origin excluded).
pub fn half_stencil(geom: &GridGeometry, reach: f64) -> Vec<Offset> {
    let o = geom.overlap.map(|v| v as isize);
    box_offsets([-o[0], -o[1], 0], o)
        .into_iter()
        .filter(|d| d[2] > 0 || (d[2] == 0 && (d[1] > 0 || (d[1] == 0 && d[0] > 0))))
        .filter(|d| geom.within_reach(*d, reach))
        .collect()
}

/// Whole neighbourhood (origin excluded).
pub fn full_stencil(geom: &GridGeometry, reach: f64) -> Vec<Offset> {
    let o = geom.overlap.map(|v| v as isize);
    box_offsets([-o[0], -o[1], -o[2]], o)
        .into_iter()
        .filter(|d| *d != [0; 3] && geom.within_reach(*d, reach))
        .collect()
}

fn owned_cells(geom: &GridGeometry) -> Vec<Offset> {
    let n = geom.cells_per_dim.map(|v| v as isize - 1);
    box_offsets([0; 3], n)
}

/// Owned base cells grouped by colour for the given stride.
pub fn colour_groups(geom: &GridGeometry, stride: [usize; 3]) -> Vec<Vec<Offset>> {
    let mut groups = vec![Vec::new(); stride.iter().product()];
    for c in owned_cells(geom) {
        let k = (c[0] as usize % stride[0]) + stride[0] * ((c[1] as usize % stride[1]) + stride[1] * (c[2] as usize % stride[2]));
        groups[k].push(c);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

pub fn colour_stride(geom: &GridGeometry, traversal: TraversalKind) -> [usize; 3] {
    let o = geom.overlap;
    match traversal {
        TraversalKind::C08 | TraversalKind::Sliced => o.map(|v| v + 1),
        TraversalKind::C18 => [2 * o[0] + 1, 2 * o[1] + 1, o[2] + 1],
        TraversalKind::C01 | TraversalKind::ListIter => [1, 1, 1],
    }
}

/// Slab decomposition used by `SLI`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabLayout {
    pub axis: usize,
    /// `bounds[k]..bounds[k + 1]` are the layers of slab `k`.
    pub bounds: Vec<usize>,
    pub overlap: usize,
}

impl SlabLayout {
    /// Slabs along the longest axis, at most one per worker and each at least
    /// `2 * overlap` layers thick.
    pub fn new(geom: &GridGeometry, workers: usize) -> Self {
        let n = geom.cells_per_dim;
        let axis = (0..3).max_by_key(|&d| (n[d], std::cmp::Reverse(d))).unwrap();
        let overlap = geom.overlap[axis];
        let layers = n[axis];
        let slabs = workers.min(layers / (2 * overlap)).max(1);
        let bounds = (0..=slabs).map(|k| k * layers / slabs).collect();
        SlabLayout { axis, bounds, overlap }
    }

    pub fn num_slabs(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Index of the lock to hold while processing `layer` of `slab`, if any.
    /// Lock `k` guards the seam between slabs `k - 1` and `k`.
    pub fn lock_for(&self, slab: usize, layer: usize) -> Option<usize> {
        let (start, end) = (self.bounds[slab], self.bounds[slab + 1]);
        if slab > 0 && layer < start + self.overlap {
            Some(slab)
        } else if slab + 1 < self.num_slabs() && layer + self.overlap >= end {
            Some(slab + 1)
        } else {
            None
        }
    }
}

/// Cells written by each task of each sequential step of a traversal; used
/// to check that concurrently scheduled tasks never share a writable cell.
pub fn write_sets(geom: &GridGeometry, traversal: TraversalKind, reach: f64, workers: usize) -> Vec<Vec<Vec<usize>>> {
    let collect = |base: Offset, offsets: &[Offset]| -> Vec<usize> {
        let mut cells: Vec<usize> = offsets.iter().filter_map(|&e| geom.index(add(base, e))).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    };
    let block: Vec<Offset> = {
        let mut v: Vec<Offset> = block_stencil(geom, reach).into_iter().flat_map(|(a, b)| [a, b]).collect();
        v.sort();
        v.dedup();
        v
    };
    match traversal {
        TraversalKind::C01 => vec![owned_cells(geom).into_iter().map(|b| collect(b, &[[0; 3]])).collect()],
        TraversalKind::C08 => colour_groups(geom, colour_stride(geom, traversal))
            .into_iter()
            .map(|g| g.into_iter().map(|b| collect(b, &block)).collect())
            .collect(),
        TraversalKind::C18 => {
            let mut offs = half_stencil(geom, reach);
            offs.push([0; 3]);
            colour_groups(geom, colour_stride(geom, traversal))
                .into_iter()
                .map(|g| g.into_iter().map(|b| collect(b, &offs)).collect())
                .collect()
        }
        TraversalKind::Sliced => {
            let slabs = SlabLayout::new(geom, workers);
            let tasks = (0..slabs.num_slabs())
                .map(|k| {
                    let mut cells = Vec::new();
                    for base in owned_cells(geom) {
                        let layer = base[slabs.axis] as usize;
                        if layer >= slabs.bounds[k] && layer < slabs.bounds[k + 1] {
                            cells.extend(collect(base, &block));
                        }
                    }
                    cells.sort_unstable();
                    cells.dedup();
                    cells
                })
                .collect();
            vec![tasks]
        }
        TraversalKind::ListIter => Vec::new(),
    }
}

/// Precomputed schedule for one traversal on one grid.
pub(crate) struct Schedule {
    traversal: TraversalKind,
    stride: [usize; 3],
    /// Cells of the block relative to its base, and the stencil as index pairs into them.
    block_cells: Vec<Offset>,
    block_flat: Vec<usize>,
    block_pairs: Vec<(usize, usize)>,
    /// Exclusive upper bound of cell coordinates on each axis.
    limit: Offset,
    neighbours: Vec<Offset>,
    slabs: Option<SlabLayout>,
}

/// Base cells with work to do, grouped into the sequential steps of a
/// schedule (colours, or layers for `SLI`), each in ascending cell order.
pub(crate) type Steps = Vec<Vec<(usize, Offset)>>;

impl Schedule {
    pub(crate) fn new(geom: &GridGeometry, traversal: TraversalKind, reach: f64, workers: usize) -> Self {
        let (neighbours, slabs) = match traversal {
            TraversalKind::C01 => (full_stencil(geom, reach), None),
            TraversalKind::C08 => (Vec::new(), None),
            TraversalKind::C18 => (half_stencil(geom, reach), None),
            TraversalKind::Sliced => (Vec::new(), Some(SlabLayout::new(geom, workers))),
            TraversalKind::ListIter => panic!("List_Iter has no cell schedule"),
        };
        let (block_cells, block_pairs) = match traversal {
            TraversalKind::C08 | TraversalKind::Sliced => {
                let cells = box_offsets([0; 3], geom.overlap.map(|v| v as isize));
                assert!(cells.len() <= 64, "block of {} cells", cells.len());
                let at = |e: Offset| cells.iter().position(|&c| c == e).unwrap();
                let pairs = block_stencil(geom, reach).into_iter().map(|(a, b)| (at(a), at(b))).collect();
                (cells, pairs)
            }
            _ => (Vec::new(), Vec::new()),
        };
        let e = geom.ext_dims();
        let block_flat = block_cells.iter().map(|c| c[0] as usize + e[0] * (c[1] as usize + e[1] * c[2] as usize)).collect();
        let limit = [0, 1, 2].map(|d| (geom.cells_per_dim[d] + geom.halo[d]) as isize);
        Schedule { traversal, stride: colour_stride(geom, traversal), block_cells, block_flat, block_pairs, limit, neighbours, slabs }
    }

    /// Active base cells for the occupancy given by `occupied` (linear
    /// indices of non-empty cells, ascending).
    pub(crate) fn steps(&self, geom: &GridGeometry, occupied: &[usize]) -> Steps {
        let e = geom.ext_dims();
        let n = geom.cells_per_dim.map(|v| v as isize);
        let coords = |idx: usize| -> Offset {
            let (x, rest) = (idx % e[0], idx / e[0]);
            let (y, z) = (rest % e[1], rest / e[1]);
            [x as isize - geom.halo[0] as isize, y as isize - geom.halo[1] as isize, z as isize - geom.halo[2] as isize]
        };
        let owned = |c: Offset| (0..3).all(|d| c[d] >= 0 && c[d] < n[d]);
        let mut bases: Vec<(usize, Offset)> = match self.traversal {
            TraversalKind::C08 | TraversalKind::Sliced => {
                let mut v = Vec::with_capacity(occupied.len() * self.block_cells.len());
                for &idx in occupied {
                    let c = coords(idx);
                    for (off, flat) in self.block_cells.iter().zip(&self.block_flat) {
                        let b = sub(c, *off);
                        if owned(b) {
                            v.push((idx - flat, b));
                        }
                    }
                }
                v.sort_unstable_by_key(|b| b.0);
                v.dedup_by_key(|b| b.0);
                v
            }
            _ => occupied.iter().map(|&idx| (idx, coords(idx))).filter(|b| owned(b.1)).collect(),
        };
        match self.traversal {
            TraversalKind::C01 => vec![bases],
            TraversalKind::Sliced => {
                let axis = self.slabs.as_ref().unwrap().axis;
                let mut layers = vec![Vec::new(); geom.cells_per_dim[axis]];
                for b in bases {
                    layers[b.1[axis] as usize].push(b);
                }
                layers
            }
            _ => {
                let s = self.stride;
                let mut groups = vec![Vec::new(); s.iter().product()];
                for b in bases.drain(..) {
                    let c = b.1.map(|v| v as usize);
                    groups[c[0] % s[0] + s[0] * (c[1] % s[1] + s[1] * (c[2] % s[2]))].push(b);
                }
                groups.retain(|g| !g.is_empty());
                groups
            }
        }
    }

    /// Runs the schedule.
    ///
    /// # Safety
    /// `cell_range` must describe the slot ranges the kernel's sink writes to.
    #[allow(clippy::too_many_arguments)]
    pub(crate) unsafe fn run<S, F, C, R>(
        &self,
        steps: &Steps,
        geom: &GridGeometry,
        workers: &Workers,
        kernel: &Kernel<'_, S, F, C>,
        newton3: bool,
        cell_range: R,
    )
    where
        S: Slots + ?Sized,
        F: ForceSink,
        C: PairCounter,
        R: Fn(usize) -> std::ops::Range<usize> + Sync,
    {
        let mode = if newton3 { PairMode::Newton3 } else { PairMode::BothDirections };
        let block_base = |&(index, base): &(usize, Offset)| {
            let mut ranges = [const { 0..0 }; 64];
            let mut any = false;
            for (k, (e, flat)) in self.block_cells.iter().zip(&self.block_flat).enumerate() {
                if (0..3).all(|d| base[d] + e[d] < self.limit[d]) {
                    ranges[k] = cell_range(index + flat);
                    any |= !ranges[k].is_empty();
                }
            }
            if !any {
                return;
            }
            for &(a, b) in &self.block_pairs {
                let (ra, rb) = (&ranges[a], &ranges[b]);
                if ra.is_empty() || (a != b && rb.is_empty()) {
                    continue;
                }
                if a == b {
                    kernel.cell_self(ra.clone(), newton3);
                } else {
                    kernel.cell_pair(ra.clone(), rb.clone(), mode);
                }
            }
        };
        match self.traversal {
            TraversalKind::C01 => {
                workers.for_each_chunked(&steps[0], 8, |&(cell, base)| {
                    let own = cell_range(cell);
                    if own.is_empty() {
                        return;
                    }
                    kernel.cell_self(own.clone(), false);
                    for &d in &self.neighbours {
                        if let Some(other) = geom.index(add(base, d)) {
                            kernel.cell_pair(own.clone(), cell_range(other), PairMode::FirstOnly);
                        }
                    }
                });
            }
            TraversalKind::C08 => {
                for step in steps {
                    workers.for_each_chunked(step, 4, block_base);
                }
            }
            TraversalKind::C18 => {
                for step in steps {
                    workers.for_each_chunked(step, 4, |&(cell, base)| {
                        let own = cell_range(cell);
                        if own.is_empty() {
                            return;
                        }
                        kernel.cell_self(own.clone(), newton3);
                        for &d in &self.neighbours {
                            if let Some(other) = geom.index(add(base, d)) {
                                kernel.cell_pair(own.clone(), cell_range(other), mode);
                            }
                        }
                    });
                }
            }
            TraversalKind::Sliced => {
                let slabs = self.slabs.as_ref().unwrap();
                let locks: Vec<Mutex<()>> = (0..=slabs.num_slabs()).map(|_| Mutex::new(())).collect();
                workers.for_each_index(slabs.num_slabs(), |k| {
                    for layer in slabs.bounds[k]..slabs.bounds[k + 1] {
                        let _guard = slabs.lock_for(k, layer).map(|l| locks[l].lock().unwrap());
                        steps[layer].iter().for_each(block_base);
                    }
                });
            }
            TraversalKind::ListIter => unreachable!(),
        }
    }
}
