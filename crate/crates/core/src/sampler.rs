//! Seeded uniform sampling of `s`-subsets.
//!
//! The random stream is ChaCha with 8 rounds (`rand_chacha` 0.3,
//! `ChaCha8Rng::seed_from_u64`), which is specified bit-for-bit and therefore
//! reproducible across platforms. Bounded integers are drawn with Lemire's
//! multiply-and-reject method implemented here, so the mapping from seed to
//! sample does not depend on `rand`'s distribution code.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// One drawn sample: `s` distinct indices into `0..n`, increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: Seed,
    pub s: usize,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("sample size must be positive")]
    EmptySample,
    #[error("sample size {s} exceeds universe size {n}")]
    SampleTooLarge { n: usize, s: usize },
}

/// Deterministic generator used by the sampler and the instance generators.
#[derive(Debug, Clone)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: Seed) -> Self {
        SampleRng {
            inner: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi as i128 - lo as i128 + 1) as u64;
        (lo as i128 + self.below(span) as i128) as i64
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Draws an `s`-subset of `0..n` uniformly with Floyd's method.
///
/// For `j` in `n-s..n`, pick `t` uniformly in `0..=j`; insert `t` unless it
/// is already chosen, in which case insert `j`. Each subset has probability
/// `1 / C(n, s)`.
pub fn random_subset(n: usize, s: usize, seed: Seed) -> Result<SampleRecord, SamplerError> {
    if s == 0 {
        return Err(SamplerError::EmptySample);
    }
    if s > n {
        return Err(SamplerError::SampleTooLarge { n, s });
    }
    let mut rng = SampleRng::new(seed);
    let mut chosen: HashSet<usize> = HashSet::with_capacity(s);
    for j in n - s..n {
        let t = rng.below(j as u64 + 1) as usize;
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut indices: Vec<usize> = chosen.into_iter().collect();
    indices.sort_unstable();
    Ok(SampleRecord { seed, s, indices })
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for repetition `trial_index` of a run seeded with `seed`.
///
/// For a fixed `seed` this is a bijection of `trial_index` (an odd multiply
/// followed by the SplitMix64 finalizer), so derived seeds never collide.
pub fn split_seed(seed: Seed, trial_index: u64) -> Seed {
    let mixed = splitmix64(seed.0 ^ GOLDEN);
    Seed(splitmix64(mixed.wrapping_add(
        trial_index.wrapping_add(1).wrapping_mul(GOLDEN),
    )))
}
