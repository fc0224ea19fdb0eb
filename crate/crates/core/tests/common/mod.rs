#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subspace_limits::linalg::{orthonormalize, RealVector, Subspace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> RealVector {
    loop {
        let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if coords.iter().map(|x| x * x).sum::<f64>() > 1e-2 {
            return RealVector::new(coords).unwrap();
        }
    }
}

pub fn random_unit(rng: &mut impl Rng, d: usize) -> RealVector {
    random_vector(rng, d).normalized().unwrap()
}

pub fn random_subspace(rng: &mut impl Rng, d: usize, k: usize) -> Subspace {
    loop {
        let vectors: Vec<RealVector> = (0..k).map(|_| random_vector(rng, d)).collect();
        if let Ok(s) = orthonormalize(&vectors) {
            return s;
        }
    }
}

/// A k×k orthogonal matrix, from Gram–Schmidt on random columns.
pub fn random_orthogonal(rng: &mut impl Rng, k: usize) -> Vec<Vec<f64>> {
    let q = random_subspace(rng, k, k);
    (0..k).map(|l| (0..k).map(|i| q.basis()[i][l]).collect()).collect()
}

/// (d, k) with 1 ≤ k ≤ min(d, 3) and d ≤ 5.
pub fn random_shape(rng: &mut impl Rng) -> (usize, usize) {
    let d = rng.gen_range(1..=5);
    let k = rng.gen_range(1..=d.min(3));
    (d, k)
}
