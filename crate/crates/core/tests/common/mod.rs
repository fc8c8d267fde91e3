#![allow(dead_code)]

use rabi_core::CouplingVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n − 1` couplings drawn uniformly from `[0.1, 10]`.
pub fn random_coupling(rng: &mut ChaCha8Rng, n: usize) -> CouplingVector {
    CouplingVector::new((0..n - 1).map(|_| rng.gen_range(0.1..10.0)).collect()).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
