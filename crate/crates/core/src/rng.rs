//! Seeded randomness.
//!
//! Every random quantity in the crate comes from a `ChaCha8Rng` built with
//! `seed_from_u64`, so a seed pins the output on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed point on the unit sphere in `n` dimensions.
pub fn random_unit_vector(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    assert!(n > 0);
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if crate::vector::normalize_in_place(&mut v).is_ok() {
            return v;
        }
    }
}

/// Uniform sample in `[lo, hi)`.
pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
