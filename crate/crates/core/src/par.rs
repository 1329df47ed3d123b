//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers run on rayon; `Execution::Sequential`
//! (or building without the feature) takes the plain iterator path. Results
//! are always returned in input order, so callers that reduce sequentially
//! afterwards get bit-identical output either way.

/// How a batch of independent work items is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Run on a dedicated pool with this many threads (0 = rayon default).
    Parallel(usize),
    /// Run on the ambient rayon pool.
    #[default]
    Ambient,
}

impl Execution {
    /// Execution mode for a requested worker count (1 means sequential).
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel(workers)
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Execution::Sequential
    }
}

/// Map `f` over `0..len`, collecting results in index order.
pub fn map_indexed<R, F>(len: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match exec {
            Execution::Sequential => (0..len).map(f).collect(),
            Execution::Ambient => (0..len).into_par_iter().map(f).collect(),
            Execution::Parallel(threads) => match rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
            {
                Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
                Err(_) => (0..len).map(f).collect(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = exec;
        (0..len).map(f).collect()
    }
}

/// Fill `out[i] = f(i)`; parallel over fixed-size chunks.
pub fn fill_indexed<F>(out: &mut [f64], exec: Execution, f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        const CHUNK: usize = 4096;
        if exec.is_parallel() && out.len() > CHUNK {
            out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = f(base + k);
                }
            });
            return;
        }
    }
    let _ = exec;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}
