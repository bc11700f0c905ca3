//! Deterministic seed derivation.
//!
//! Every random stream is a `ChaCha8Rng` whose seed is folded from a master
//! seed and a list of coordinates (parameter fingerprint, replicate index,
//! stream purpose) with the SplitMix64 finaliser. Results therefore depend
//! only on coordinates, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream purposes used when deriving seeds.
pub mod stream {
    pub const DICTIONARY: u64 = 0x6469_6374;
    pub const ORDER: u64 = 0x6f72_6465;
    pub const NULL_INTERROGATION: u64 = 0x6e75_6c6c;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold coordinates into a child seed.
pub fn derive_seed(master: u64, coordinates: &[u64]) -> u64 {
    coordinates.iter().fold(splitmix64(master), |acc, &c| {
        splitmix64(acc ^ splitmix64(c))
    })
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
