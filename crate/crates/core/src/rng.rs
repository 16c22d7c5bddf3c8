//! Deterministic seeded randomness for sampled checks.
//!
//! SplitMix64 with the published constants (increment 0x9E3779B97F4A7C15,
//! mixers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Every randomized sweep
//! in the crate takes the generator explicitly, so a run is reproducible
//! from its seed alone, on any platform.

use alloc::vec::Vec;

use crate::multiindex::MultiIndex;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` by rejection, so the distribution is unbiased and
    /// platform-independent.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Random element of `{lo..=hi}^dim`.
    pub fn element(&mut self, dim: usize, lo: u32, hi: u32) -> MultiIndex {
        let entries: Vec<u32> = (0..dim)
            .map(|_| lo + self.below((hi - lo + 1) as u64) as u32)
            .collect();
        MultiIndex::new(entries)
    }

    /// Random nonzero rational with |numerator| and denominator at most
    /// `max_abs`.
    pub fn rational(&mut self, max_abs: u64) -> Rational {
        loop {
            let num = self.below(2 * max_abs + 1) as i64 - max_abs as i64;
            if num == 0 {
                continue;
            }
            let den = 1 + self.below(max_abs) as i64;
            return Rational::new(num.into(), den.into());
        }
    }

    /// Random exact real point in `ℚ^dim` with entries from [`Self::rational`].
    pub fn point(&mut self, dim: usize, max_abs: u64) -> Vec<Scalar> {
        (0..dim)
            .map(|_| Scalar::from_rational(self.rational(max_abs)))
            .collect()
    }
}
