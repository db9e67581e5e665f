//! Shared input builders for the benchmark targets.

use afc_core::Tensor3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seeded Gaussian signal of length `n`.
pub fn signal(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Seeded Gaussian tensor of shape `(c, h, w)`.
pub fn tensor(seed: u64, c: usize, h: usize, w: usize) -> Tensor3 {
    Tensor3::new(c, h, w, signal(seed, c * h * w)).expect("finite data")
}
