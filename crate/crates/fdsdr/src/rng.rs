//! Seeded random number generation.
//!
//! Every stochastic component of the crate (data generators, optimizer
//! restarts, Monte-Carlo repetitions) draws from a ChaCha8 stream keyed by a
//! `u64` seed, so results are reproducible across runs and platforms.
//! Independent sub-streams are derived with [`derive`] rather than by seed
//! arithmetic, which keeps streams from colliding when callers use
//! consecutive base seeds.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Create the generator for a given seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive the seed of an independent sub-stream (splitmix64 finalizer).
pub fn derive(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
