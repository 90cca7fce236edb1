//! Reproducible random streams.
//!
//! Every stochastic operation takes a [`SeedRecord`]. Independent workers get
//! disjoint ChaCha20 stream indices, so results never depend on how work is
//! split.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub const GENERATOR: &str = "chacha20";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedRecord {
    pub generator: String,
    pub seed: u64,
    pub stream: u64,
}

impl SeedRecord {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeedRecord {
            generator: GENERATOR.to_string(),
            seed,
            stream,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Same seed, stream `self.stream + offset` (wrapping).
    pub fn substream(&self, offset: u64) -> SeedRecord {
        SeedRecord {
            generator: self.generator.clone(),
            seed: self.seed,
            stream: self.stream.wrapping_add(offset),
        }
    }

    /// Stream keyed by lattice coordinates, used for per-center draws.
    pub fn keyed(&self, key: &[i64]) -> SeedRecord {
        let mut h = splitmix64(self.stream ^ 0x5eed_5eed_5eed_5eed);
        for &k in key {
            h = splitmix64(h ^ k as u64);
        }
        SeedRecord {
            generator: self.generator.clone(),
            seed: self.seed,
            stream: h,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
