//! Seedable, splittable random streams.
//!
//! Monte-Carlo trials run in parallel; every consumer derives its own
//! `ChaCha12` stream from `(seed, stream index)` so results do not depend on
//! execution order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 step; the standard seed-expansion mixer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed for an independent group of streams (one per sweep
/// cell, say) from a master seed and a salt.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut state = seed ^ salt.wrapping_mul(0xA076_1D64_78BD_642F);
    splitmix64(&mut state)
}

/// Derive the RNG for logical stream `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut state = seed ^ 0xD1B5_4A32_D192_ED03u64.wrapping_mul(index.wrapping_add(1));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}
