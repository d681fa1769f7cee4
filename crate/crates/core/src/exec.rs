//! Execution strategy for the batch workloads (chain sweeps, corpus runs).
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] fans work out on
//! the rayon pool. Without it, `Parallel` silently runs sequentially, so
//! callers never need their own `cfg` branches.

/// How a batch workload is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this build can actually run work in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Map every item and fold the results with an associative `reduce`.
    /// Results are combined in an unspecified order, so `reduce` should be
    /// commutative or the caller should sort afterwards.
    pub fn map_reduce<T, R, M, I, F>(self, items: Vec<T>, map: M, identity: I, reduce: F) -> R
    where
        T: Send,
        R: Send,
        M: Fn(T) -> R + Sync + Send,
        I: Fn() -> R + Sync + Send,
        F: Fn(R, R) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(map).reduce(identity, reduce)
            }
            _ => items.into_iter().map(map).fold(identity(), reduce),
        }
    }

    /// Order-preserving map.
    pub fn map<T, R, M>(self, items: Vec<T>, map: M) -> Vec<R>
    where
        T: Send,
        R: Send,
        M: Fn(T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(map).collect()
            }
            _ => items.into_iter().map(map).collect(),
        }
    }
}
