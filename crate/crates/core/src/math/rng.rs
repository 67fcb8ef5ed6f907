//! Seedable random-number stream with a fixed, build-stable draw sequence.
//!
//! All randomness in the crate flows through [`RngStream`] so that a run is
//! fully determined by its seed. Child streams are forked by seed derivation
//! rather than by sharing state, which keeps concurrent runs independent.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Owned random stream. Same seed, same sequence of draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha12Rng,
    forks: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
            forks: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent child stream. Children of the same parent get
    /// distinct seeds; the derivation is deterministic in (seed, fork index).
    pub fn fork(&mut self) -> RngStream {
        self.forks += 1;
        RngStream::new(mix(self.seed, self.forks))
    }

    /// A fresh seed derived from this stream, for components that construct
    /// their own stream (e.g. the cheap MO solver).
    pub fn derive_seed(&mut self) -> u64 {
        self.forks += 1;
        mix(self.seed, self.forks)
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Modulo bias is negligible for the population sizes used here.
        (self.inner.next_u64() % n as u64) as usize
    }

    /// Standard normal draw (Box-Muller; one value per call, no caching, so
    /// the stream layout stays easy to reason about).
    pub fn normal(&mut self) -> f64 {
        loop {
            let u1 = self.uniform();
            if u1 > 0.0 {
                let u2 = self.uniform();
                return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            }
        }
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// SplitMix64-style finalizer used for fork-seed derivation.
fn mix(seed: u64, counter: u64) -> u64 {
    let mut z = seed ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
