use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One sample's coordinates: `(master_seed, sample_index)` fixes the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub sample_index: u64,
}

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        SeedSpec {
            master_seed,
            sample_index,
        }
    }

    /// The per-sample generator: ChaCha8 keyed by the 256-bit word
    /// `mix(s) ‖ mix(i) ‖ mix(s ⊕ φ) ‖ mix(i ⊕ φ')` with the SplitMix64
    /// finalizer `mix`. The first two words are injective in `(s, i)`, so
    /// distinct samples never share a stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let words = [
            mix64(self.master_seed),
            mix64(self.sample_index),
            mix64(self.master_seed ^ 0x9e37_79b9_7f4a_7c15),
            mix64(self.sample_index ^ 0xd1b5_4a32_d192_ed03),
        ];
        let mut key = [0u8; 32];
        for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = SeedSpec::new(7, 3).rng().random();
        let b: u64 = SeedSpec::new(7, 3).rng().random();
        let c: u64 = SeedSpec::new(7, 4).rng().random();
        let d: u64 = SeedSpec::new(8, 3).rng().random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn mix_known_value() {
        // first SplitMix64 output for state 0 is mix(0x9e3779b97f4a7c15)
        assert_eq!(mix64(0x9e37_79b9_7f4a_7c15), 0xe220_a839_7b1d_cdaf);
    }
}
