//! Seeded, splittable random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose 256-bit key
//! is derived from a [`SeedPath`]: the user seed followed by a list of child
//! indices (restart number, scan step, sample index, ...). Keys are derived with
//! SplitMix64, so a given path always yields the same stream on every platform
//! and independently of which thread consumes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A position in the tree of random streams rooted at a user seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPath {
    seed: u64,
    key: u64,
}

impl SeedPath {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        Self {
            seed,
            key: splitmix64(&mut s),
        }
    }

    /// The user seed at the root of this path.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives the stream for child `index`. Distinct indices give unrelated streams.
    pub fn child(&self, index: u64) -> Self {
        let mut s = self.key ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03);
        let a = splitmix64(&mut s);
        let b = splitmix64(&mut s);
        Self {
            seed: self.seed,
            key: a ^ b.rotate_left(17),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut s = self.key;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}
