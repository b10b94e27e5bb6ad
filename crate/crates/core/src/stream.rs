//! Per-replicate random streams and the ordered parallel map over them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{PcdError, Result};

/// Replicate `rep` draws from stream `rep` of the ChaCha key derived from
/// `seed`, so its numbers do not depend on which thread runs it.
pub(crate) fn replicate_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Runs `f` on every replicate and returns the results in replicate order.
/// `workers = None` uses the global rayon pool.
pub(crate) fn map_replicates<T, F>(reps: usize, seed: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let run = || {
        (0..reps as u64)
            .into_par_iter()
            .map(|rep| f(&mut replicate_rng(seed, rep)))
            .collect::<Result<Vec<T>>>()
    };
    match workers {
        None => run(),
        Some(0) => Err(PcdError::WorkerPool("worker count must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| PcdError::WorkerPool(e.to_string()))?
            .install(run),
    }
}
