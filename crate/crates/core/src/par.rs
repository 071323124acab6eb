//! Trial-level parallelism.
//!
//! `LSQRANK_THREADS` caps the worker count: unset uses rayon's default pool,
//! `0` runs sequentially, and any other value builds a pool of that size.
//! Results are always returned in index order.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "LSQRANK_THREADS";

fn configured_threads() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
}

pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match configured_threads() {
        Some(0) => (0..count).map(f).collect(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
            Err(_) => (0..count).map(f).collect(),
        },
        None => (0..count).into_par_iter().map(f).collect(),
    }
}
