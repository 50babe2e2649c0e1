//! Seed derivation.
//!
//! Every randomized stage takes a `u64` seed. Child seeds are derived from a
//! parent seed and an item index with [`mix_seed`], which makes per-item
//! generation independent of evaluation order:
//!
//! ```text
//! mix_seed(seed, index) = splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15))
//! ```
//!
//! `splitmix64` is the standard finalizer (Steele, Lea, Flood 2014).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of item `index` from a parent `seed`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// Stage identifiers used when deriving stage seeds from a global seed.
pub mod stage {
    pub const VOI_POSITIONS: u64 = 1;
    pub const LABELS: u64 = 2;
    pub const BURSTS: u64 = 3;
    pub const TRAJECTORIES: u64 = 4;
    pub const SPLIT: u64 = 5;
    pub const FOREST: u64 = 6;
}

/// The generator used throughout the crate. ChaCha8 output is specified
/// bit-for-bit, so streams are identical on every platform.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
