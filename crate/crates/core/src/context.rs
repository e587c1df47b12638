use std::sync::Arc;

use rayon::ThreadPool;

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 20_000_000;
pub const DEFAULT_SEED: u64 = 42;

/// Run-wide settings threaded through every enumeration and randomized search.
#[derive(Clone)]
pub struct Context {
    /// Maximum number of words any single enumeration may visit.
    pub budget: u64,
    /// Seed for every randomized search.
    pub seed: u64,
    threads: Option<usize>,
    pool: Option<Arc<ThreadPool>>,
}

impl Default for Context {
    fn default() -> Self {
        Context { budget: DEFAULT_BUDGET, seed: DEFAULT_SEED, threads: None, pool: None }
    }
}

impl std::fmt::Debug for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Context")
            .field("budget", &self.budget)
            .field("seed", &self.seed)
            .field("threads", &self.threads)
            .finish()
    }
}

impl Context {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Use a dedicated pool of `n` workers instead of the global rayon pool.
    pub fn with_threads(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("thread count must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::input(format!("cannot start {n} worker threads: {e}")))?;
        self.threads = Some(n);
        self.pool = Some(Arc::new(pool));
        Ok(self)
    }

    pub fn threads(&self) -> usize {
        self.threads.unwrap_or_else(rayon::current_num_threads)
    }

    /// Run `f` inside the configured pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    /// Fails with a resource error when `count` words exceed the budget.
    pub fn check_budget(&self, what: &str, count: f64) -> Result<()> {
        if count > self.budget as f64 {
            Err(Error::Resource { what: what.to_string(), needed: count, cap: self.budget })
        } else {
            Ok(())
        }
    }
}
