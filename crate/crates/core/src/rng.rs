//! Counter-based, splittable 64-bit random numbers.
//!
//! A stream is a 128-bit key; the `i`-th output of a stream is a pure
//! function of `(key, i)`. Child streams are derived from a parent key and
//! an index, so shard `s` of a simulation produces the same numbers no
//! matter how many shards run concurrently or in which order.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key0: u64,
    key1: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            key0: mix64(seed ^ 0x6A09_E667_F3BC_C908),
            key1: mix64(seed.wrapping_add(GOLDEN_GAMMA) ^ 0xBB67_AE85_84CA_A73B),
            counter: 0,
        }
    }

    /// Independent child stream number `index`. Does not advance `self`.
    pub fn split(&self, index: u64) -> Self {
        let h = mix64(index.wrapping_mul(GOLDEN_GAMMA) ^ self.key1);
        CounterRng {
            key0: mix64(self.key0 ^ h),
            key1: mix64(self.key1.wrapping_add(h) ^ 0x3C6E_F372_FE94_F82B),
            counter: 0,
        }
    }

    /// Output number `counter` of this stream, without touching the state.
    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        let z = mix64(counter.wrapping_mul(GOLDEN_GAMMA) ^ self.key0);
        mix64(z.wrapping_add(self.key1))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Lemire's multiply-shift with rejection.
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
