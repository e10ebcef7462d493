use super::{BigInt, ExactError};
use num_traits::{One, Zero};
use std::sync::{Arc, OnceLock, RwLock};

/// Environment variable read once to pre-size the shared cache.
pub const BINOMIAL_CACHE_ENV: &str = "BMTK_BINOMIAL_CACHE";

/// Rows of Pascal's triangle, built lazily and shared across threads.
///
/// Each row is computed on first use and then read without locking
/// contention beyond a shared read guard.
#[derive(Debug, Default)]
pub struct BinomialCache {
    rows: RwLock<Vec<Option<Arc<[BigInt]>>>>,
}

impl BinomialCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A cache with rows `0..=max_row` already materialized.
    pub fn with_rows(max_row: u64) -> Self {
        let cache = Self::new();
        for n in 0..=max_row {
            cache.row(n);
        }
        cache
    }

    /// The whole row `C(n, 0..=n)`.
    pub fn row(&self, n: u64) -> Arc<[BigInt]> {
        let idx = n as usize;
        if let Some(Some(row)) = self.rows.read().unwrap().get(idx) {
            return Arc::clone(row);
        }
        let built = self.build_row(n);
        let mut rows = self.rows.write().unwrap();
        if rows.len() <= idx {
            rows.resize(idx + 1, None);
        }
        Arc::clone(rows[idx].get_or_insert(built))
    }

    fn build_row(&self, n: u64) -> Arc<[BigInt]> {
        // Extend from the previous row when it is already cached.
        if n > 0 {
            let prev = self
                .rows
                .read()
                .unwrap()
                .get(n as usize - 1)
                .cloned()
                .flatten();
            if let Some(prev) = prev {
                let mut row = Vec::with_capacity(n as usize + 1);
                row.push(BigInt::one());
                row.extend(prev.windows(2).map(|w| &w[0] + &w[1]));
                row.push(BigInt::one());
                return row.into();
            }
        }
        let mut row = Vec::with_capacity(n as usize + 1);
        let mut c = BigInt::one();
        row.push(c.clone());
        for k in 0..n {
            c = c * BigInt::from(n - k) / BigInt::from(k + 1);
            row.push(c.clone());
        }
        row.into()
    }

    /// `C(n, k)`, zero for `k` outside `0..=n`.
    pub fn get(&self, n: i64, k: i64) -> Result<BigInt, ExactError> {
        if n < 0 {
            return Err(ExactError::NegativeBinomialRow(n));
        }
        if k < 0 || k > n {
            return Ok(BigInt::zero());
        }
        Ok(self.row(n as u64)[k as usize].clone())
    }

    pub fn cached_rows(&self) -> usize {
        self.rows.read().unwrap().iter().flatten().count()
    }

    /// Process-wide cache, pre-sized from `BMTK_BINOMIAL_CACHE` if set.
    pub fn shared() -> &'static BinomialCache {
        static SHARED: OnceLock<BinomialCache> = OnceLock::new();
        SHARED.get_or_init(|| {
            match std::env::var(BINOMIAL_CACHE_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<u64>().ok())
            {
                Some(rows) => BinomialCache::with_rows(rows),
                None => BinomialCache::new(),
            }
        })
    }
}

/// `C(n, k)` from the shared cache.
pub fn binomial(n: i64, k: i64) -> Result<BigInt, ExactError> {
    BinomialCache::shared().get(n, k)
}
