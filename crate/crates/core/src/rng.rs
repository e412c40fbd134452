//! Splittable random streams.
//!
//! A [`Stream`] is a seeded ChaCha generator. [`Stream::split`] derives an
//! independent child stream from a counter, so replica `i` of an experiment
//! always sees the same randomness regardless of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct Stream {
    key: u64,
    rng: ChaCha8Rng,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self { key: seed, rng: ChaCha8Rng::seed_from_u64(mix(seed)) }
    }

    /// Child stream number `index`; does not advance `self`.
    pub fn split(&self, index: u64) -> Self {
        Self::new(mix(self.key ^ mix(index.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ 0x5851_F42D)))
    }

    pub fn seed(&self) -> u64 {
        self.key
    }
}

impl RngCore for Stream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
