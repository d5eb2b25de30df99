//! Counter-based pseudo-random source for reproducible workloads.
//!
//! Every draw is a pure function of `(seed, counter)`: the SplitMix64
//! finalizer applied to `seed + (counter + 1) * GOLDEN_GAMMA`. There is no
//! hidden stream state, so a trace generator can document exactly which
//! counter produced which field and any other implementation (in any
//! language) can reproduce the trace bit for bit.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stateless seeded generator; draws are addressed by counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The uniform 64-bit value at `counter`.
    pub fn bits(&self, counter: u64) -> u64 {
        let mut z = self
            .seed
            .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..len`. `len` must be positive.
    pub fn index(&self, counter: u64, len: usize) -> usize {
        debug_assert!(len > 0);
        let idx = (self.uniform(counter) * len as f64) as usize;
        idx.min(len - 1)
    }

    /// Exponential variate with the given mean, by inverse transform.
    pub fn exponential(&self, counter: u64, mean: f64) -> f64 {
        debug_assert!(mean > 0.0);
        -mean * (1.0 - self.uniform(counter)).ln()
    }

    /// Index drawn with probability proportional to `weights`.
    ///
    /// Total weight must be positive; individual weights may be zero.
    pub fn weighted_index(&self, counter: u64, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0);
        let mut x = self.uniform(counter) * total;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        // Fall back to the last positive weight when rounding pushes x past the end.
        weights.iter().rposition(|w| *w > 0.0).unwrap()
    }
}
