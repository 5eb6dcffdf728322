//! Sub-seed derivation. Every random stream in the toolkit is seeded from
//! one base seed, a stage name and an index, so any stage can be rerun on
//! its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `splitmix(splitmix(seed ^ fnv(stage)) ^ index)`; stable across platforms
/// and releases.
pub fn derive_seed(seed: u64, stage: &str, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ fnv1a(stage.as_bytes())) ^ index)
}

pub fn rng_for(seed: u64, stage: &str, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stage, index))
}
