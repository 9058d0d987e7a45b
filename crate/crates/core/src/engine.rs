use std::path::Path;

use crate::cache::Cache;
use crate::error::{Error, Result};

/// Counters for one engine's lifetime (or since the last reset).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// sigma values computed by recursion (memo misses)
    pub sigma_evals: u64,
    /// phi values computed by recursion (memo misses)
    pub phi_evals: u64,
    /// memo lookups answered from the table
    pub cache_hits: u64,
}

/// Recursion state for one ambient `P^n`: the memo tables and counters.
///
/// All computations take `&mut self`; results depend only on their
/// arguments, never on what the tables already hold.
#[derive(Debug)]
pub struct Engine {
    n: u32,
    pub(crate) cache: Cache,
    pub(crate) stats: Stats,
}

impl Engine {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAmbient(n));
        }
        Ok(Self {
            n,
            cache: Cache::new(n),
            stats: Stats::default(),
        })
    }

    /// Start from previously computed tables.
    pub fn with_cache(cache: Cache) -> Result<Self> {
        let mut engine = Self::new(cache.ambient())?;
        engine.cache = cache;
        Ok(engine)
    }

    pub fn ambient(&self) -> u32 {
        self.n
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = Stats::default();
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    pub fn into_cache(self) -> Cache {
        self.cache
    }

    /// Merge a saved table into this engine's memo.
    pub fn load_cache(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let loaded = Cache::load(path)?;
        self.cache.merge(loaded)?;
        Ok(())
    }

    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        self.cache.save(path)?;
        Ok(())
    }

    pub(crate) fn check_ambient(&self, n: u32) -> Result<()> {
        if n != self.n {
            return Err(Error::AmbientMismatch {
                engine: self.n,
                query: n,
            });
        }
        Ok(())
    }
}
