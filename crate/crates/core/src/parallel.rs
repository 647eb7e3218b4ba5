//! Deterministic chunked sampling.
//!
//! A run of `samples` draws is cut into fixed chunks of [`CHUNK_SIZE`]. Chunk
//! `c` owns its own ChaCha8 stream (`seed`, stream `c`), so its draws do not
//! depend on which worker executes it. Chunk results are collected in chunk
//! order and folded sequentially, which makes every estimate bit-identical
//! across thread counts and across the `parallel` feature.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of samples per chunk.
pub const CHUNK_SIZE: u64 = 8192;

/// How chunks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work stealing; falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Sample count, seed and scheduling for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl Sampling {
    pub fn new(samples: u64, seed: u64) -> Self {
        Sampling { samples, seed, execution: Execution::default() }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn chunks(&self) -> u64 {
        self.samples.div_ceil(CHUNK_SIZE)
    }
}

/// RNG owned by chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `work(rng, len)` once per chunk and returns the results in chunk order.
pub fn map_chunks<T, F>(sampling: &Sampling, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync + Send,
{
    let total = sampling.samples;
    let seed = sampling.seed;
    let run = |c: u64| {
        let len = CHUNK_SIZE.min(total - c * CHUNK_SIZE);
        let mut rng = chunk_rng(seed, c);
        work(&mut rng, len)
    };
    match sampling.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..sampling.chunks()).into_par_iter().map(run).collect()
        }
        _ => (0..sampling.chunks()).map(run).collect(),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers. Without the
/// `parallel` feature this simply calls `f`.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
