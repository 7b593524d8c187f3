//! Counter-based seed derivation.
//!
//! Every trial gets its own stream, keyed by `(global_seed, trial_index,
//! stream)`, so results do not depend on which worker ran a trial or in what
//! order trials finished.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for the per-trial fluctuation RNG.
pub const STREAM_TRIAL: u64 = 0x7472_6961_6c00_0001;
/// Stream tag for per-trial map generation.
pub const STREAM_MAP: u64 = 0x6d61_7000_0000_0002;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(global_seed: u64, index: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(global_seed) ^ index) ^ stream)
}

pub fn trial_seed(global_seed: u64, index: u64) -> u64 {
    derive(global_seed, index, STREAM_TRIAL)
}

pub fn map_seed(global_seed: u64, index: u64) -> u64 {
    derive(global_seed, index, STREAM_MAP)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
