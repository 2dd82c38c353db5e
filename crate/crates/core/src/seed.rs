//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a master
//! seed plus a path of tags, so folds, phases and sweep levels get
//! independent streams no matter which order they execute in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a sequence of tags into a child seed.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream tags. Values are arbitrary but frozen: changing one changes every
/// report produced under a given master seed.
pub mod tag {
    pub const FOLDS: u64 = 1;
    pub const DOWNSAMPLE: u64 = 2;
    pub const PREPROCESS: u64 = 3;
    pub const PHASE_ONE: u64 = 11;
    pub const PHASE_TWO: u64 = 12;
    pub const SYNTH: u64 = 21;
}
