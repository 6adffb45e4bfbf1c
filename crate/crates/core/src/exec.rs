//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature off, or when a caller asks for one worker,
//! everything runs on the calling thread. Results never depend on the
//! number of workers.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether parallel execution is compiled in.
pub const PARALLEL: bool = cfg!(feature = "parallel");

/// First item (in slice order) for which `f` returns `Some`.
pub fn find_map_first<T, R, F>(items: &[T], workers: usize, f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        let min_len = (items.len() / (4 * workers)).max(1);
        return items.par_iter().with_min_len(min_len).find_map_first(f);
    }
    let _ = workers;
    items.iter().find_map(f)
}

/// `items.map(f)` preserving order.
pub fn map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        return items.par_iter().map(f).collect();
    }
    let _ = workers;
    items.iter().map(f).collect()
}

/// Run `f` inside a pool with `threads` workers (the global pool when 0).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}

/// Number of workers available to the current pool.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_match_is_independent_of_workers() {
        let v: Vec<u32> = (0..10_000).collect();
        for w in [1, 2, 8] {
            assert_eq!(find_map_first(&v, w, |&x| (x % 997 == 996).then_some(x)), Some(996));
            assert_eq!(map_ordered(&v[..5], w, |x| x * 2), vec![0, 2, 4, 6, 8]);
        }
    }
}
