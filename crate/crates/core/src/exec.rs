//! Execution policy for the data-parallel kernels.
//!
//! Every hot loop in the crate (tuple scans, orbit frontiers, group
//! enumeration, exhaustive identity checks) goes through the helpers here.
//! With the `parallel` feature they run on the rayon pool; without it, or
//! with [`ExecPolicy::Sequential`], they run on the calling thread. Results
//! are identical either way: reductions are integer sums, boolean
//! conjunctions, or order-preserving collections.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a kernel distributes its work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

/// Number of worker threads the parallel policy will use.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Configures the global worker pool. Only the first call has an effect.
pub fn init_workers(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

/// `Σ f(i)` over `range`.
pub fn sum_range<F>(policy: ExecPolicy, range: Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return range.into_par_iter().map(f).sum();
    }
    let _ = policy;
    range.map(f).sum()
}

/// `∀ i ∈ range: f(i)`, short-circuiting.
pub fn all_range<F>(policy: ExecPolicy, range: Range<u64>, f: F) -> bool
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return range.into_par_iter().all(f);
    }
    let _ = policy;
    range.into_iter().all(f)
}

/// Runs `f` over fixed-size chunks of `items`, letting it push any number of
/// outputs; the concatenated output preserves chunk order.
pub fn flat_map_chunks<T, U, F>(policy: ExecPolicy, items: &[T], chunk: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&[T], &mut Vec<U>) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if policy.is_parallel() && items.len() > chunk {
        let parts: Vec<Vec<U>> = items
            .par_chunks(chunk)
            .map(|c| {
                let mut out = Vec::new();
                f(c, &mut out);
                out
            })
            .collect();
        return parts.into_iter().flatten().collect();
    }
    let _ = policy;
    let mut out = Vec::new();
    for c in items.chunks(chunk) {
        f(c, &mut out);
    }
    out
}

/// Collects `f(i)` for every `i` in `range` where it returns `Some`, in index order.
pub fn filter_map_range<U, F>(policy: ExecPolicy, range: Range<u64>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return range.into_par_iter().filter_map(f).collect();
    }
    let _ = policy;
    range.filter_map(f).collect()
}

/// `min f(x)` over a slice, or `None` for an empty slice.
pub fn min_by_key_slice<T, F>(policy: ExecPolicy, items: &[T], f: F) -> Option<u64>
where
    T: Sync,
    F: Fn(&T) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        return items.par_iter().map(f).min();
    }
    let _ = policy;
    items.iter().map(f).min()
}
