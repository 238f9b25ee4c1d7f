use mmwave_core::sim::{DropOutcome, DropRunner};
use rayon::prelude::*;

/// Runs drops on a dedicated rayon pool. Every drop draws from its own
/// substreams, so the thread count never changes the results.
pub struct ParallelRunner {
    pool: rayon::ThreadPool,
}

impl ParallelRunner {
    /// `threads == 0` uses one thread per available core.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(ParallelRunner { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl DropRunner for ParallelRunner {
    fn run_indices(
        &self,
        drops: u64,
        f: &(dyn Fn(u64) -> mmwave_core::Result<DropOutcome> + Sync),
    ) -> mmwave_core::Result<Vec<DropOutcome>> {
        self.pool.install(|| (0..drops).into_par_iter().map(f).collect())
    }
}
