//! Seedable, splittable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by `seed` (expanded through
//! `SeedableRng::seed_from_u64`) with its 64-bit stream id set to the
//! substream index. The output is therefore a pure function of
//! `(seed, substream, draw index)`, independent of thread scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 2^-53
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        Self { rng }
    }

    /// Uniform on `(0, 1]` with 53 bits of resolution; never returns zero.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * UNIT
    }

    /// Exponential(1) by inversion.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }
}
