//! Seeded random generators for beliefs, lotteries, acts and utilities.
//!
//! All sampling in the crate goes through ChaCha8 so results are stable
//! across platforms and `rand` minor versions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Act, JointBelief, Lottery, ModelError, UtilityTensor};

/// Generator for `(seed, stream)`; distinct streams are independent.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the open simplex (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-12)
        .collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize) -> Result<JointBelief, ModelError> {
    let flat = random_simplex(rng, k * n);
    JointBelief::from_rows(flat.chunks(n).map(<[f64]>::to_vec).collect())
}

pub fn random_lottery<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Lottery {
    Lottery::new(random_simplex(rng, m)).expect("sampled simplex point is a lottery")
}

pub fn random_act<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize, m: usize) -> Act {
    Act::from_fn(k, n, |_, _| random_lottery(rng, m)).expect("shape is consistent")
}

/// vNM values drawn uniformly from `[-1, 1]`.
pub fn random_vnm<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Per-state vNM utility (`K × M`), uniformly drawn.
pub fn random_state_utility<R: Rng + ?Sized>(rng: &mut R, k: usize, m: usize) -> Vec<Vec<f64>> {
    (0..k).map(|_| random_vnm(rng, m)).collect()
}

/// Fully state-dependent tensor `v[s][t][x]`.
pub fn random_utility<R: Rng + ?Sized>(rng: &mut R, k: usize, n: usize, m: usize) -> UtilityTensor {
    let values = (0..k * n * m).map(|_| rng.random_range(-1.0..1.0)).collect();
    UtilityTensor::new(k, n, m, values).expect("shape is consistent")
}
