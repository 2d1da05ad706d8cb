//! Shared worker pool.

use std::sync::OnceLock;

use rayon::ThreadPool;

/// Rayon pool used by every parallel loop in the crate. `PVC_THREADS`
/// caps its size; unset or invalid values fall back to rayon's default.
pub fn thread_pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("PVC_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
        {
            if n > 0 {
                b = b.num_threads(n);
            }
        }
        b.build().expect("thread pool")
    })
}
