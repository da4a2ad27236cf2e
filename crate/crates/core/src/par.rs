//! Execution policy for the data-parallel loops.
//!
//! Every parallel loop in the crate is an indexed map whose results are
//! collected in index order and reduced sequentially, so the sequential and
//! parallel policies produce bit-identical output.

/// How indexed work items are executed.
/// Defaults to `Parallel` when the `parallel` feature is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
        }
    }
}

/// Number of samples drawn per RNG stream in the Monte Carlo loops.
///
/// Chunk `k` covers samples `[k * CHUNK_SAMPLES, (k + 1) * CHUNK_SAMPLES)` and
/// draws from `ChaCha8Rng::seed_from_u64(seed)` with stream `k`. Changing this
/// constant changes every seeded result.
pub const CHUNK_SAMPLES: usize = 1 << 14;

pub(crate) fn chunk_bounds(total: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..total.div_ceil(CHUNK_SAMPLES)).map(move |k| {
        let start = k * CHUNK_SAMPLES;
        (start, (start + CHUNK_SAMPLES).min(total))
    })
}

pub(crate) fn chunk_count(total: usize) -> usize {
    total.div_ceil(CHUNK_SAMPLES)
}

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}
