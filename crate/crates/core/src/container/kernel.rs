//! Cell-pair and particle-list force kernels, generic over the data layout.

use crate::lj::{force_prefactor, PairTable};
use crate::parallel::SharedMut;
use crate::vec3::Vec3;
use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};

/// Read access to positions and species of the particles a kernel works on.
pub trait Slots: Sync {
    fn pos(&self, s: usize) -> Vec3;
    fn ty(&self, s: usize) -> u32;
}

/// Write access to the force accumulators.
pub(crate) trait ForceSink: Sync {
    /// # Safety
    /// No other worker may access slot `s` concurrently.
    unsafe fn add(&self, s: usize, f: Vec3);
}

/// Counts force evaluations inside the cutoff. `()` counts nothing.
pub trait PairCounter: Sync {
    fn add(&self, n: u64);
}

impl PairCounter for () {
    #[inline(always)]
    fn add(&self, _: u64) {}
}

impl PairCounter for AtomicU64 {
    #[inline]
    fn add(&self, n: u64) {
        if n > 0 {
            self.fetch_add(n, Ordering::Relaxed);
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AosSlot {
    pub pos: Vec3,
    pub ty: u32,
}

impl Slots for [AosSlot] {
    #[inline(always)]
    fn pos(&self, s: usize) -> Vec3 {
        self[s].pos
    }
    #[inline(always)]
    fn ty(&self, s: usize) -> u32 {
        self[s].ty
    }
}

#[derive(Clone, Debug, Default)]
pub struct SoaSlots {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub ty: Vec<u32>,
}

impl Slots for SoaSlots {
    #[inline(always)]
    fn pos(&self, s: usize) -> Vec3 {
        Vec3([self.x[s], self.y[s], self.z[s]])
    }
    #[inline(always)]
    fn ty(&self, s: usize) -> u32 {
        self.ty[s]
    }
}

pub(crate) struct AosSink(pub SharedMut<Vec3>);

impl ForceSink for AosSink {
    #[inline(always)]
    unsafe fn add(&self, s: usize, f: Vec3) {
        *self.0.get_mut(s) += f;
    }
}

pub(crate) struct SoaSink(pub [SharedMut<f64>; 3]);

impl ForceSink for SoaSink {
    #[inline(always)]
    unsafe fn add(&self, s: usize, f: Vec3) {
        *self.0[0].get_mut(s) += f[0];
        *self.0[1].get_mut(s) += f[1];
        *self.0[2].get_mut(s) += f[2];
    }
}

/// How a cell pair `(a, b)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// One evaluation per pair, written to both cells.
    Newton3,
    /// Two independent evaluations per pair, one per direction; writes both cells.
    BothDirections,
    /// Only forces on `a` are computed and written.
    FirstOnly,
}

pub(crate) struct Kernel<'a, S: ?Sized, F, C> {
    pub slots: &'a S,
    pub sink: &'a F,
    pub table: &'a PairTable,
    pub cutoff2: f64,
    pub counter: &'a C,
}

impl<S: Slots + ?Sized, F: ForceSink, C: PairCounter> Kernel<'_, S, F, C> {
    #[inline(always)]
    fn force_on_range(&self, i: usize, others: Range<usize>, skip: Option<usize>, n: &mut u64) -> Vec3 {
        let pi = self.slots.pos(i);
        let ti = self.slots.ty(i);
        let mut fi = Vec3::ZERO;
        for j in others {
            if Some(j) == skip {
                continue;
            }
            let d = pi - self.slots.pos(j);
            let r2 = d.norm2();
            if r2 < self.cutoff2 {
                fi += d * force_prefactor(r2, self.table.get(ti, self.slots.ty(j)));
                *n += 1;
            }
        }
        fi
    }

    /// Interactions between two distinct cells.
    ///
    /// # Safety
    /// The caller owns the slots of `a` (and of `b` unless `mode` is `FirstOnly`).
    pub(crate) unsafe fn cell_pair(&self, a: Range<usize>, b: Range<usize>, mode: PairMode) {
        if a.is_empty() || b.is_empty() {
            return;
        }
        let mut n = 0;
        match mode {
            PairMode::Newton3 => {
                for i in a {
                    let pi = self.slots.pos(i);
                    let ti = self.slots.ty(i);
                    let mut fi = Vec3::ZERO;
                    for j in b.clone() {
                        let d = pi - self.slots.pos(j);
                        let r2 = d.norm2();
                        if r2 < self.cutoff2 {
                            let f = d * force_prefactor(r2, self.table.get(ti, self.slots.ty(j)));
                            fi += f;
                            self.sink.add(j, -f);
                            n += 1;
                        }
                    }
                    self.sink.add(i, fi);
                }
            }
            PairMode::BothDirections => {
                for i in a.clone() {
                    let fi = self.force_on_range(i, b.clone(), None, &mut n);
                    self.sink.add(i, fi);
                }
                for j in b {
                    let fj = self.force_on_range(j, a.clone(), None, &mut n);
                    self.sink.add(j, fj);
                }
            }
            PairMode::FirstOnly => {
                for i in a {
                    let fi = self.force_on_range(i, b.clone(), None, &mut n);
                    self.sink.add(i, fi);
                }
            }
        }
        self.counter.add(n);
    }

    /// Interactions inside one cell.
    ///
    /// # Safety
    /// The caller owns the slots of `a`.
    pub(crate) unsafe fn cell_self(&self, a: Range<usize>, newton3: bool) {
        let mut n = 0;
        if newton3 {
            for i in a.clone() {
                let pi = self.slots.pos(i);
                let ti = self.slots.ty(i);
                let mut fi = Vec3::ZERO;
                for j in i + 1..a.end {
                    let d = pi - self.slots.pos(j);
                    let r2 = d.norm2();
                    if r2 < self.cutoff2 {
                        let f = d * force_prefactor(r2, self.table.get(ti, self.slots.ty(j)));
                        fi += f;
                        self.sink.add(j, -f);
                        n += 1;
                    }
                }
                self.sink.add(i, fi);
            }
        } else {
            for i in a.clone() {
                let fi = self.force_on_range(i, a.clone(), Some(i), &mut n);
                self.sink.add(i, fi);
            }
        }
        self.counter.add(n);
    }
}
