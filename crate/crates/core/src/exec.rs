// Map-reduce over work units. With the `parallel` feature off, or with a
// single worker, everything runs on the calling thread; useful for
// benchmarking the sequential baseline and for debugging.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

pub(crate) struct Executor {
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub(crate) fn new(workers: usize) -> Result<Self> {
        #[cfg(feature = "parallel")]
        {
            let pool = if workers > 1 {
                Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .thread_name(|i| format!("sweep-{i}"))
                        .build()
                        .map_err(|e| crate::error::Error::InvalidArgument(e.to_string()))?,
                )
            } else {
                None
            };
            Ok(Self { pool })
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = workers;
            Ok(Self {})
        }
    }

    /// Folds `map(item)` over `items` with an associative, commutative `reduce`.
    pub(crate) fn map_reduce<T, R, M, F>(&self, items: &[T], map: M, reduce: F) -> Result<R>
    where
        T: Sync,
        R: Send + Default,
        M: Fn(&T) -> Result<R> + Sync + Send,
        F: Fn(R, R) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(|| {
                items
                    .par_iter()
                    .map(&map)
                    .try_reduce(R::default, |a, b| Ok(reduce(a, b)))
            });
        }
        items
            .iter()
            .try_fold(R::default(), |acc, item| Ok(reduce(acc, map(item)?)))
    }
}
