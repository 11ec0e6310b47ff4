//! Labeled, reproducible random streams.
//!
//! A stream is a ChaCha8 generator keyed by the master seed, with the ChaCha
//! stream id derived from the label. Two labels under one seed therefore draw
//! from disjoint keystreams, and `(seed, label)` fixes the whole sequence.

use alloc::string::String;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    label: String,
    rng: ChaCha8Rng,
}

/// 64-bit FNV-1a.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

impl RngStream {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label_hash(label));
        RngStream { seed, label: label.into(), rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// A child stream, independent of this one, named `<label>/<sub>`.
    pub fn derive(&self, sub: &str) -> Self {
        let mut label = self.label.clone();
        label.push('/');
        label.push_str(sub);
        RngStream::new(self.seed, &label)
    }
}

/// Shorthand for [`RngStream::new`].
pub fn seeded_rng(seed: u64, label: &str) -> RngStream {
    RngStream::new(seed, label)
}

impl RngCore for RngStream {
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
