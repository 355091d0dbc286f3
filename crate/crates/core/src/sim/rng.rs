//! Random streams.
//!
//! Every sensor owns a ChaCha8 stream keyed by `seed_from_u64(seed)` with the
//! stream number set to the sensor index; the access-phase shuffle uses stream
//! `u64::MAX`. Uniform variates take the top 53 bits of `next_u64`, so results
//! are identical on every platform and independent of `rand` distribution code.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const SHUFFLE_STREAM: u64 = u64::MAX;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform on `[0, 1)`.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn bernoulli(rng: &mut impl RngCore, p: f64) -> bool {
    uniform(rng) < p
}

/// Uniform on `0..n`.
#[inline]
pub fn index(rng: &mut impl RngCore, n: usize) -> usize {
    ((uniform(rng) * n as f64) as usize).min(n - 1)
}

/// Fisher-Yates.
pub fn shuffle<T>(rng: &mut impl RngCore, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        items.swap(i, index(rng, i + 1));
    }
}
