use bubblelab_core::runner::Runner;
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs work items on a dedicated rayon pool. Results keep index order, so
/// output does not depend on the thread count.
pub struct RayonRunner {
    pool: ThreadPool,
}

impl RayonRunner {
    /// `jobs == 0` lets rayon pick the thread count.
    pub fn new(jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        Ok(RayonRunner { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Runner for RayonRunner {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}
