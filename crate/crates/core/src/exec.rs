//! Pluggable evaluation of independent work items.
//!
//! Greedy sweeps and reference solves are embarrassingly parallel over the training set. The core
//! stays single-threaded; callers with a thread pool implement [`Executor`] and get the same
//! results, because items are always collected back in index order.

use alloc::vec::Vec;

/// Maps a function over `0..len`, returning the results in index order.
pub trait Executor: Sync {
    /// Evaluates `f(i)` for every `i < len`.
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every item on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
