use std::ops::Range;

use rayon::prelude::*;
use segangle_core::sampling::ChunkExecutor;

use crate::CliError;

/// Runs chunks on a dedicated rayon pool. Output order is chunk order, so results
/// match [`segangle_core::sampling::Sequential`] bit for bit.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `threads == 0` lets rayon pick the number of workers.
    pub fn new(threads: usize) -> Result<Self, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }
}

impl ChunkExecutor for Parallel {
    fn map_chunks<T, F>(&self, chunks: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| chunks.into_par_iter().map(job).collect())
    }
}
