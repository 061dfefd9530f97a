//! Seeded random streams.
//!
//! Every trial gets a child seed derived from `(master seed, trial index)`,
//! and each consumer inside a trial draws from its own ChaCha stream lane, so
//! results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Stream = ChaCha20Rng;

/// Lane for ground-truth and data generation.
pub const LANE_DATA: u64 = 0;
/// Base lane for row splitting; the method index is added.
pub const LANE_SPLIT: u64 = 16;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child `index` under `master`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

pub fn lane(seed: u64, lane: u64) -> Stream {
    let mut rng = Stream::seed_from_u64(seed);
    rng.set_stream(lane);
    rng
}
