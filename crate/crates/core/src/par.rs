//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread with rayon; without it
//! every helper runs on the calling thread. Results are always returned in
//! input order, so outputs do not depend on the worker count.

/// Execution strategy for the inner loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}


#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `lo..=hi`, preserving order.
pub fn map_range<R, F>(exec: Exec, lo: i64, hi: i64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(i64) -> R + Sync + Send,
{
    if hi < lo {
        return Vec::new();
    }
    match exec {
        Exec::Sequential => (lo..=hi).map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => (lo..=hi).into_par_iter().map(f).collect(),
    }
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Exec::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
    }
}

/// Runs `f` with at most `jobs` worker threads (`0` keeps the global default).
pub fn with_jobs<R, F>(jobs: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(f);
            }
        }
        f()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_range(Exec::Sequential, -3, 40, |i| i * i);
        let def = map_range(Exec::default(), -3, 40, |i| i * i);
        assert_eq!(seq, def);
        assert!(map_range(Exec::default(), 2, 1, |i| i).is_empty());
        let v: Vec<i32> = (0..100).collect();
        assert_eq!(map_slice(Exec::default(), &v, |x| x + 1)[99], 100);
        assert_eq!(with_jobs(2, || map_range(Exec::default(), 0, 9, |i| i).len()), 10);
    }
}
