//! Seeded pseudo-random numbers (PCG-64, `rand_pcg::Pcg64`).

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

/// Deterministic generator: identical seeds give identical streams.
#[derive(Debug, Clone)]
pub struct SeededRng(Pcg64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Pcg64::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}
