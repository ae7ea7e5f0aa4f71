//! Deterministic random number generation.
//!
//! All stochastic code in this crate draws from ChaCha12 streams seeded
//! through [`crate::seed::derive`], and converts to floating point with
//! fixed arithmetic, so equal seeds give bit-identical sample paths on
//! every platform.

use rand_chacha::ChaCha12Rng;
pub use rand_core::RngCore;
use rand_core::SeedableRng;

/// The stream cipher generator used throughout the crate.
pub type Rng = ChaCha12Rng;

/// New generator for a 64-bit seed.
pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Uniform f64 in `[0, 1)` with 53 random bits.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Standard normal variates via the Marsaglia polar method.
///
/// Carries the spare deviate of each accepted pair, so the draw sequence
/// is a pure function of the underlying stream.
pub struct GaussianSource<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> GaussianSource<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * uniform(&mut self.rng) - 1.0;
            let v = 2.0 * uniform(&mut self.rng) - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}
