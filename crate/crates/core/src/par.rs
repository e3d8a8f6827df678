//! Data-parallel map over independent jobs.
//!
//! With the `parallel` feature the jobs run on the rayon pool; without it
//! they run in order on the calling thread. Results keep the input order
//! either way. Every job builds its own solvers, so nothing is shared.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, in parallel when the feature is enabled.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map(items, f)
    }
}

/// The sequential reference, always available.
pub fn seq_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Whether [`par_map`] uses worker threads in this build.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
