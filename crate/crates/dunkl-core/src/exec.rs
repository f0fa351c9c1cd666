//! Execution shim: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work runs on rayon unless the caller asks
//! for sequential execution; without the feature rayon is compiled out
//! entirely. Results are always collected in input order, so the two modes
//! produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to run an embarrassingly parallel loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Plain sequential iteration.
    Sequential,
    /// Rayon work-stealing when the `parallel` feature is enabled; falls
    /// back to sequential otherwise.
    #[default]
    Auto,
}

/// Map `f` over `items`, preserving order.
pub fn map_collect<T, U, F>(par: Parallelism, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if par == Parallelism::Auto {
            return items.par_iter().map(f).collect();
        }
    }
    let _ = par;
    items.iter().map(f).collect()
}

/// Map `f` over an index range, preserving order.
pub fn map_range<U, F>(par: Parallelism, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if par == Parallelism::Auto {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = par;
    (0..n).map(f).collect()
}
