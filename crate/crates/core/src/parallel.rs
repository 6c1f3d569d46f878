//! Execution-strategy helpers for the data-parallel inner loops (per-observation
//! E-step moments, batch density evaluation, replicate sweeps).
//!
//! With the `parallel` feature (default) `maybe_par_map` fans out over rayon;
//! without it, it degrades to `seq_map`. Both preserve input order, and all
//! reductions downstream are performed sequentially over the collected vector,
//! so results are bitwise identical under either strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice with the configured strategy (parallel when enabled).
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map(items, f)
    }
}

/// Sequential map; always available (benchmark baseline and fallback).
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
