//! Data-parallel inner loops with a sequential fallback.
//!
//! The sampling harnesses and the finite-model sweep map a pure function over
//! an index range and fold the results. With the `parallel` feature (default)
//! the map runs on rayon; without it the same code runs sequentially. Both
//! produce identical output because every work item derives its own RNG
//! stream from `(seed, index)`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub const MODE: &str = if cfg!(feature = "parallel") {
    "rayon"
} else {
    "sequential"
};

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_items<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_items<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    F: Fn(I) -> T,
{
    items.into_iter().map(f).collect()
}
