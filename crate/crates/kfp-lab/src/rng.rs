//! Deterministic stream management: one ChaCha stream per (seed, index).
//! Trials own disjoint streams, so results are independent of worker count
//! and scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream `index` of the generator family seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stable stream index for trial `trial` of experiment phase `phase`.
/// Phases keep sampling purposes on disjoint streams within one run.
pub fn stream_index(phase: u64, trial: u64) -> u64 {
    phase << 40 | trial
}
