//! Counter-based pseudorandom numbers.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so values can be
//! generated in any order or in parallel and still reproduce bit for bit on
//! every platform. The algorithm is fixed and must not change:
//!
//! ```text
//! mix(z):   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31                             (SplitMix64 finalizer)
//! key     = mix(seed ^ (stream * 0x9E3779B97F4A7C15))
//! draw(i) = mix(key + (i + 1) * 0xD1B54A32D192ED03)
//! ```
//!
//! All arithmetic is wrapping on 64-bit unsigned integers. Uniform doubles use
//! the top 53 bits: `(draw >> 11) * 2^-53`, giving values in `[0, 1)`.

const STREAM_MUL: u64 = 0x9E37_79B9_7F4A_7C15;
const COUNTER_MUL: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed stream. Cheap to copy; holds no mutable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            key: mix64(seed ^ stream.wrapping_mul(STREAM_MUL)),
        }
    }

    /// Derive an independent child stream, e.g. one per material or per frame.
    pub fn substream(&self, stream: u64) -> Self {
        Self::new(self.key, stream)
    }

    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(COUNTER_MUL)),
        )
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        (self.u64_at(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn range_at(&self, counter: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_at(counter)
    }

    /// Standard normal via Box-Muller; consumes counters `2c` and `2c + 1`.
    pub fn normal_at(&self, counter: u64) -> f64 {
        let base = counter.wrapping_mul(2);
        // 1 - u lies in (0, 1], keeping ln finite
        let u1 = 1.0 - self.uniform_at(base);
        let u2 = self.uniform_at(base.wrapping_add(1));
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-shift; bias below 2^-32 for our bounds).
    #[inline]
    pub fn index_at(&self, counter: u64, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.u64_at(counter) as u128 * bound as u128) >> 64) as usize
    }

    /// The first `count` entries of a Fisher-Yates shuffle of `0..n`: `count`
    /// distinct indices drawn uniformly without replacement.
    pub fn sample_without_replacement(&self, n: usize, count: usize) -> Vec<usize> {
        let count = count.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.index_at(i as u64, n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}
