//! Deterministic replica-parallel sampling.
//!
//! Replica `i` draws from a ChaCha stream keyed by the master seed with
//! stream number `i`, so its samples do not depend on which worker runs it.
//! Results are collected in replica order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// The generator used by replica `index` of a run seeded with `seed`.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `f` once per replica on a pool of `workers` threads (`0` means the
/// global pool) and returns the outputs in replica order.
pub fn run_replicas<T, F>(replicas: usize, seed: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let job = || {
        (0..replicas)
            .into_par_iter()
            .map(|i| f(&mut replica_rng(seed, i as u64)))
            .collect()
    };
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::DomainError(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Inverse-CDF draw from a cumulative table whose last entry is 1.
pub(crate) fn draw_index(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

pub(crate) fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}
