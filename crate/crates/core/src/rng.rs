//! Deterministic random streams.
//!
//! Every stream is a ChaCha8 keystream. The 256-bit key is expanded from the
//! 64-bit master seed (`SeedableRng::seed_from_u64`), and the 64-bit ChaCha
//! stream id packs `(replica << 32) | diagonal`. Distinct `(replica, diagonal)`
//! pairs therefore read disjoint keystreams of the same key, so diagonals and
//! replicas can be generated in any order or in parallel with bit-identical
//! results.
//!
//! Normal variates use the Box-Muller transform on 53-bit uniforms; both
//! outputs of each transform are consumed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Key derived once from a master seed, from which streams are opened.
#[derive(Clone, Debug)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
        }
    }

    /// Opens the stream for `(replica, diagonal)`.
    pub fn stream(&self, replica: u32, diagonal: u32) -> Stream {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(((replica as u64) << 32) | diagonal as u64);
        Stream { rng, spare: None }
    }
}

/// A single random stream with uniform and standard-normal samplers.
#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    /// Shorthand for `StreamKey::new(seed).stream(replica, diagonal)`.
    pub fn new(seed: u64, replica: u32, diagonal: u32) -> Self {
        StreamKey::new(seed).stream(replica, diagonal)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    fn uniform_open_low(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_POW_M53
    }

    /// Standard normal via Box-Muller.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open_low();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.normal();
        }
    }
}
