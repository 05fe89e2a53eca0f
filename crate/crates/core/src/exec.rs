//! Execution helpers: data-parallel maps with a sequential fallback.
//!
//! With the `parallel` feature (default) these fan out over the rayon
//! thread pool; without it they run serially. Results are collected in
//! input order either way, so callers observe identical output for both
//! modes and for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over a slice, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, U: Send, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub fn map_range<U: Send, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_slice_preserves_order() {
        let xs = vec![3, 1, 4, 1, 5];
        assert_eq!(map_slice(&xs, |x| x * 2), vec![6, 2, 8, 2, 10]);
    }

    #[test]
    fn map_range_preserves_order() {
        assert_eq!(map_range(4, |i| i * i), vec![0, 1, 4, 9]);
    }
}
