//! Seeded random-number streams.
//!
//! All randomness in the crate flows through [`SimRng`], a ChaCha8 stream
//! cipher RNG. ChaCha8 is a named, versioned algorithm whose output is
//! identical across platforms, so a run is fully determined by its `u64`
//! seed. Seeds are expanded by `seed_from_u64` (a SplitMix64-style hash),
//! which means nearby seeds still produce unrelated streams.
//!
//! Draw order is part of every simulator's contract:
//! - discrete engine: one uniform (action), then one standard Gaussian
//!   (reward noise) per round, always in that order;
//! - continuous engine: `k` standard Gaussians per step, in arm order;
//! - scalar hitting-time simulators: one Gaussian per step on a stream of
//!   their own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The crate-wide RNG. Same seed, same stream, on every platform.
pub type SimRng = ChaCha8Rng;

/// Build the stream for a single run from its seed.
pub fn rng_for_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Derive a sub-seed for a tagged family of runs (e.g. one engine out of
/// two sharing a base seed). SplitMix64 over the combined words.
pub fn substream_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One standard Gaussian draw.
#[inline]
pub fn standard_normal(rng: &mut SimRng) -> f64 {
    rng.sample(StandardNormal)
}

/// One uniform draw in `[0, 1)`.
#[inline]
pub fn uniform01(rng: &mut SimRng) -> f64 {
    rng.gen::<f64>()
}
