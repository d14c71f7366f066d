//! Pluggable execution of independent work items.

use alloc::vec::Vec;

/// Runs `f(0) .. f(count - 1)` and returns the results in index order.
pub trait Runner: Sync {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Runner for Sequential {
    fn map<T: Send>(&self, count: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..count).map(f).collect()
    }
}
