//! Seeded, platform-independent random streams.
//!
//! Every random draw in the crate goes through a ChaCha8 generator keyed by a
//! user seed and a fixed stream id, so that independent consumers (the error
//! table, permutation sampling, optimiser initialisation, bootstrap resamples)
//! never share a sequence.

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Stream used to draw error-rate tables.
pub const STREAM_ERROR_TABLE: u64 = 0;
/// Stream used to sample permutations.
pub const STREAM_PERMUTATIONS: u64 = 1;
/// Stream used to initialise variational parameters.
pub const STREAM_VQE_INIT: u64 = 2;
/// Base stream for bootstrap resamples; resample `b` uses `STREAM_BOOTSTRAP + b`.
pub const STREAM_BOOTSTRAP: u64 = 1 << 32;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed for the `index`-th repetition of an experiment.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
