//! Seeded random streams.
//!
//! Every random quantity in this crate is drawn from a [`SeedStream`]: a
//! xoshiro256++ generator whose 256-bit state is expanded from a 64-bit seed
//! with SplitMix64 (the reference `seed_from_u64` of `rand_xoshiro`).
//! Sub-streams are obtained by [`derive_seed`], so that every consumer of
//! randomness is a pure function of a single master seed.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use statrs::distribution::{ContinuousCDF, Normal};

/// Identifier recorded in serialized transforms.
pub const RNG_ID: &str = "xoshiro256++/splitmix64";

/// Identifier of the Gaussian sampler recorded in serialized transforms.
pub const GAUSSIAN_METHOD: &str = "inverse-cdf/u53-midpoint";

/// Identifier of the per-trial seed derivation rule.
pub const SEED_RULE_ID: &str = "splitmix64-mix(master ^ golden*index)";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of sub-stream `index` from `master`.
///
/// `mix64(master ^ index * GOLDEN_GAMMA)`. Multiplication by an odd constant and
/// `mix64` are both bijections, so for a fixed master distinct indices never
/// collide.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ index.wrapping_mul(GOLDEN_GAMMA))
}

/// A deterministic stream of uniform, sign and Gaussian variates.
#[derive(Debug, Clone)]
pub struct SeedStream {
    inner: Xoshiro256PlusPlus,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1): the top 53 bits shifted to the
    /// midpoint of their cell.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Rademacher variate; `+1` when the top bit is clear.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal variate by inversion of the normal CDF at
    /// [`Self::open_unit`].
    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        standard_normal().inverse_cdf(self.open_unit())
    }

    pub fn gaussian_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Uniform point on the unit sphere of R^`dim` (normalized Gaussian).
    pub fn unit_sphere(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let mut v = self.gaussian_vec(dim);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
                return v;
            }
        }
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}
