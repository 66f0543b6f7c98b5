//! Data-parallel helpers with a sequential fallback when the `parallel`
//! feature is disabled.

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Map `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    seq_map(items, f)
}

/// Sequential map, always available (used as the baseline in benchmarks).
pub fn seq_map<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}
