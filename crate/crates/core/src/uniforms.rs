//! Addressable uniforms `U_t(e)` for edge updates.
//!
//! Each trial owns a ChaCha8 key. Time step `t` selects the ChaCha stream and
//! edge `e` the 64-bit word inside it, so `U_t(e)` is a pure function of
//! `(seed, t, e)` no matter in which order the values are requested. Both the
//! plain Home-MEG evolution and the coupled construction read the same field.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TO_UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * TO_UNIT
}

/// SplitMix64 finaliser, used to derive independent trial keys.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(mix64(seed), |acc, &i| mix64(acc ^ mix64(i)))
}

#[derive(Debug, Clone)]
pub struct EdgeUniforms {
    seed: u64,
    rng: ChaCha8Rng,
}

impl EdgeUniforms {
    pub fn new(seed: u64) -> Self {
        EdgeUniforms {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent field for trial `index` under a master `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        Self::new(derive_seed(seed, &[index]))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `U_t(e)`.
    pub fn at(&mut self, t: u64, e: usize) -> f64 {
        self.rng.set_stream(t);
        self.rng.set_word_pos(2 * e as u128);
        to_unit(self.rng.next_u64())
    }

    /// Fills `out[e] = U_t(e)` for `e = 0..out.len()`.
    pub fn fill_step(&mut self, t: u64, out: &mut [f64]) {
        self.rng.set_stream(t);
        self.rng.set_word_pos(0);
        for slot in out.iter_mut() {
            *slot = to_unit(self.rng.next_u64());
        }
    }
}
