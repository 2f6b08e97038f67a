//! Seedable random stream used by every stochastic operation.
//!
//! Backed by the ChaCha8 block cipher in counter mode (published constants,
//! identical output on every platform). Sub-streams come from ChaCha's
//! 64-bit stream counter, so `derive(seed, i)` and `derive(seed, j)` are
//! independent for i != j. The platform default generator is never used.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Single-owner random stream. Parallel code derives one sub-stream per
/// worker instead of sharing; see [`RngStream::derive`].
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Sub-stream `index` of the generator seeded with `seed`.
    /// Same (seed, index) always yields the same sequence.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self {
            seed,
            stream: index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Unbiased integer in [0, bound) by rejection sampling.
    pub fn gen_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "gen_index bound must be positive");
        let m = bound as u64;
        // Accept x < floor(2^64 / m) * m, i.e. x <= u64::MAX - (2^64 mod m).
        let rem = ((u64::MAX % m) + 1) % m;
        let limit = u64::MAX - rem;
        loop {
            let x = self.next_u64();
            if x <= limit {
                return (x % m) as usize;
            }
        }
    }

    /// Standard normal via Box-Muller on the stream's uniforms.
    pub fn standard_normal(&mut self) -> f64 {
        // u1 in (0, 1] so the log is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.gen_index(i + 1);
            items.swap(i, j);
        }
    }
}
