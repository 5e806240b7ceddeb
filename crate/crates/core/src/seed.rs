//! Seed derivation. Every random stream in the crate comes from a named seed
//! mixed with a stream index, so per-node and per-walk work can run in any
//! order (or in parallel) and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` of a run seeded with `run_seed`.
pub fn derive(run_seed: u64, index: u64) -> u64 {
    mix64(run_seed ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(run_seed: u64, index: u64) -> ChaCha8Rng {
    rng(derive(run_seed, index))
}
