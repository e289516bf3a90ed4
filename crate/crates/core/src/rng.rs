//! Seeded randomness and the per-trial stream split.
//!
//! Every randomized routine takes a `u64` seed and builds a [`ChaCha8Rng`]
//! from it. Independent substreams (one per trial, or per repetition inside a
//! driver) are derived with [`split_seed`], so running trials in any order or
//! in parallel gives the same results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of substream `index` under `master`.
///
/// Two rounds of the SplitMix64 finalizer over `master` and `index`; distinct
/// indices give unrelated seeds and the map is a pure function of its inputs.
pub fn split_seed(master: u64, index: u64) -> u64 {
    mix(mix(master ^ 0x6a09_e667_f3bc_c908).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
