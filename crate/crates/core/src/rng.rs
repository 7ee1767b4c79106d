//! Seeded, platform-independent randomness with per-replica streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator: identical `(seed, replica)` gives identical output everywhere.
#[derive(Clone, Debug)]
pub struct RngHandle {
    inner: ChaCha8Rng,
    seed: u64,
    replica: u64,
}

impl RngHandle {
    pub fn new(seed: u64) -> Self {
        Self::with_replica(seed, 0)
    }

    pub fn with_replica(seed: u64, replica: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(replica);
        RngHandle { inner, seed, replica }
    }

    /// Independent stream for replica `r` of the same seed.
    pub fn split(&self, replica: u64) -> Self {
        Self::with_replica(self.seed, replica)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map({
            let mut r = RngHandle::with_replica(7, 3);
            move |_| r.gen()
        }).collect();
        let mut r = RngHandle::new(7).split(3);
        let b: Vec<u64> = (0..4).map(|_| r.gen()).collect();
        assert_eq!(a, b);
        let mut other = RngHandle::with_replica(7, 4);
        assert_ne!(a[0], other.gen::<u64>());
        // Recorded first output; guards against generator or seeding changes.
        const PINNED: u64 = 13080132717333068652;
        let mut fixed = RngHandle::new(0);
        assert_eq!(fixed.next_u64(), PINNED);
    }
}
