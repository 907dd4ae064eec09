//! Counter-based randomness keyed by `(seed, sample, slot)`.
//!
//! Sample `s` reads ChaCha8 stream `s`; slot `k` owns the `k`-th 64-bit word
//! of that stream. Reading slots in order is the same as seeking to each
//! one, so results do not depend on iteration order or thread schedule.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sequential reader over the slots of one sample.
pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, sample: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample);
        SampleStream { rng }
    }

    /// Positions the reader at `slot`.
    pub fn seek(&mut self, slot: u64) {
        self.rng.set_word_pos(u128::from(slot) * 2);
    }

    /// Next slot value mapped uniformly onto `0..n` (multiply-high; the bias
    /// is below `n / 2^64`).
    pub fn below(&mut self, n: u64) -> u64 {
        ((u128::from(self.rng.next_u64()) * u128::from(n)) >> 64) as u64
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Value of a single slot, mapped onto `0..n`.
pub fn keyed_below(seed: u64, sample: u64, slot: u64, n: u64) -> u64 {
    let mut s = SampleStream::new(seed, sample);
    s.seek(slot);
    s.below(n)
}
