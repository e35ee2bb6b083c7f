//! Worker pools for the force traversals.
//!
//! With the `parallel` feature (default) a [`Workers`] with more than one
//! thread runs loops on a dedicated rayon pool. With one thread, or without
//! the feature, the same loops run sequentially on the caller's thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
#[cfg(feature = "parallel")]
use std::collections::HashMap;
#[cfg(feature = "parallel")]
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone)]
pub struct Workers {
    threads: usize,
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Workers {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Workers").field("threads", &self.threads).finish()
    }
}

#[cfg(feature = "parallel")]
fn shared_pool(threads: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS.get_or_init(Default::default).lock().unwrap();
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(move |i| format!("mdtune-{threads}-{i}"))
                    .build()
                    .expect("failed to start worker pool"),
            )
        })
        .clone()
}

impl Workers {
    /// Pools are shared process-wide per thread count.
    pub fn new(threads: usize) -> Self {
        let threads = threads.max(1);
        Workers {
            threads,
            #[cfg(feature = "parallel")]
            pool: (threads > 1).then(|| shared_pool(threads)),
        }
    }

    pub fn sequential() -> Self {
        Workers::new(1)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    /// Calls `f` for every element; order unspecified when parallel.
    pub fn for_each<T, F>(&self, items: &[T], f: F)
    where
        T: Sync,
        F: Fn(&T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            pool.install(|| items.par_iter().for_each(f));
            return;
        }
        items.iter().for_each(f)
    }

    /// Like [`Workers::for_each`], but never hands a task fewer than `min_len` items.
    pub fn for_each_chunked<T, F>(&self, items: &[T], min_len: usize, f: F)
    where
        T: Sync,
        F: Fn(&T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            pool.install(|| items.par_iter().with_min_len(min_len.max(1)).for_each(f));
            return;
        }
        let _ = min_len;
        items.iter().for_each(f)
    }

    /// Calls `f(i)` for `i in 0..n`, one task per index when parallel.
    pub fn for_each_index<F>(&self, n: usize, f: F)
    where
        F: Fn(usize) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            pool.install(|| (0..n).into_par_iter().with_max_len(1).for_each(f));
            return;
        }
        (0..n).for_each(f)
    }
}

/// Raw view of a mutable slice that may be written from several workers.
///
/// Callers guarantee that no two workers touch the same index concurrently;
/// the traversal schedules provide that guarantee.
pub(crate) struct SharedMut<T> {
    ptr: *mut T,
    len: usize,
}

unsafe impl<T: Send> Send for SharedMut<T> {}
unsafe impl<T: Send> Sync for SharedMut<T> {}

impl<T> SharedMut<T> {
    pub(crate) fn new(slice: &mut [T]) -> Self {
        SharedMut { ptr: slice.as_mut_ptr(), len: slice.len() }
    }

    /// # Safety
    /// `i < len` and no other worker accesses index `i` at the same time.
    #[inline(always)]
    pub(crate) unsafe fn get_mut(&self, i: usize) -> &mut T {
        debug_assert!(i < self.len);
        &mut *self.ptr.add(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn visits_every_index_once() {
        for threads in [1, 3] {
            let w = Workers::new(threads);
            let hits: Vec<AtomicUsize> = (0..100).map(|_| AtomicUsize::new(0)).collect();
            w.for_each_index(100, |i| {
                hits[i].fetch_add(1, Ordering::Relaxed);
            });
            assert!(hits.iter().all(|h| h.load(Ordering::Relaxed) == 1));
            let items: Vec<usize> = (0..57).collect();
            let sum = AtomicUsize::new(0);
            w.for_each_chunked(&items, 8, |&i| {
                sum.fetch_add(i, Ordering::Relaxed);
            });
            assert_eq!(sum.load(Ordering::Relaxed), 56 * 57 / 2);
        }
    }

    #[test]
    fn thread_count_clamped() {
        assert_eq!(Workers::new(0).threads(), 1);
        assert!(!Workers::new(1).is_parallel());
    }
}
