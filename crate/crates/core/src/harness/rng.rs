//! Seeded random streams.
//!
//! Every run draws from a ChaCha8 stream seeded with a 64-bit value. Sweep
//! points derive their seed as `base ^ mix(key)` where
//! `key = v_index << 42 | delta_index << 21 | replication` and `mix` is the
//! SplitMix64 finalizer. The finalizer is a bijection fixing zero, so the
//! first point of every sweep reuses the base seed unchanged and distinct
//! points (indices below 2²¹) get distinct seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for sweep point `(v_index, delta_index, replication)`.
pub fn derive_seed(base: u64, v_index: usize, delta_index: usize, replication: usize) -> u64 {
    const MASK: u64 = (1 << 21) - 1;
    let key = ((v_index as u64 & MASK) << 42)
        | ((delta_index as u64 & MASK) << 21)
        | (replication as u64 & MASK);
    base ^ mix(key)
}
