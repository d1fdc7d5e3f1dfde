//! Reproducible Monte Carlo work splitting.
//!
//! Work is cut into fixed-size chunks and chunk `k` draws from ChaCha stream `k` of the
//! master seed, so results depend only on `(seed, sample count)` and never on how many
//! threads ran them. Results come back in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk.
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub seed: u64,
    /// `1` runs on the calling thread; `0` uses the rayon default.
    pub threads: usize,
}

impl McConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, threads: 1 }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// A generator for worker `index`, independent of every other index.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        stream_rng(self.seed, index)
    }
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `work(count, rng)` over chunks covering `total` samples.
pub fn map_chunks<T, F>(total: usize, cfg: &McConfig, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let chunks = total.div_ceil(CHUNK);
    let size = |k: usize| CHUNK.min(total - k * CHUNK);
    let run = |k: usize| work(size(k), &mut cfg.stream(k as u64));
    if cfg.threads == 1 || chunks <= 1 {
        return (0..chunks).map(run).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        builder = builder.num_threads(cfg.threads);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| (0..chunks).into_par_iter().map(run).collect()),
        Err(_) => (0..chunks).map(run).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn thread_count_does_not_change_results() {
        let total = 3 * CHUNK + 17;
        let f = |count: usize, rng: &mut ChaCha8Rng| (0..count).map(|_| rng.random::<f64>()).sum::<f64>();
        let one = map_chunks(total, &McConfig::new(9), f);
        let four = map_chunks(total, &McConfig::new(9).with_threads(4), f);
        assert_eq!(one.len(), 4);
        assert_eq!(one, four);
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream_rng(1, 0).random();
        let b: u64 = stream_rng(1, 1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn empty_work() {
        let out: Vec<usize> = map_chunks(0, &McConfig::new(1), |c, _| c);
        assert!(out.is_empty());
    }
}
