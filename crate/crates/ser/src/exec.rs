use rayon::prelude::*;
use ser_core::exec::Executor;

/// Runs work items on the global rayon pool; results come back in index order, so output is
/// independent of the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).into_par_iter().map(f).collect()
    }
}
