//! Seeded sampling of directions and flags.
//!
//! Sphere directions come from a Halton sequence with a seeded
//! Cranley–Patterson shift, mapped to Gaussians by Box–Muller and
//! normalized. Output depends only on `(dim, count, seed)`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const PRIMES: [u32; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113, 127, 131,
];

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let base = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` low-discrepancy unit vectors in Euclidean `R^dim`.
pub fn sphere_directions(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    assert!(dim >= 1, "direction sampling needs dim >= 1");
    let pairs = dim.div_ceil(2);
    assert!(2 * pairs <= PRIMES.len(), "direction sampling supports dim <= {}", PRIMES.len());
    let mut r = rng(seed);
    let shift: Vec<f64> = (0..2 * pairs).map(|_| r.random::<f64>()).collect();
    let mut out = Vec::with_capacity(count);
    let mut index: u64 = 1;
    while out.len() < count {
        let mut z = DVector::zeros(dim);
        for p in 0..pairs {
            let a = (radical_inverse(index, PRIMES[2 * p]) + shift[2 * p]).fract();
            let b = (radical_inverse(index, PRIMES[2 * p + 1]) + shift[2 * p + 1]).fract();
            let radius = (-2.0 * (1.0 - a).ln()).sqrt();
            let angle = std::f64::consts::TAU * b;
            z[2 * p] = radius * angle.cos();
            if 2 * p + 1 < dim {
                z[2 * p + 1] = radius * angle.sin();
            }
        }
        index += 1;
        let norm = z.norm();
        if norm > 1e-8 {
            out.push(z / norm);
        }
    }
    out
}

/// A standard Gaussian vector.
pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unit() {
        let a = sphere_directions(5, 64, 7);
        let b = sphere_directions(5, 64, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
        assert_ne!(a, sphere_directions(5, 64, 8));
    }

    #[test]
    fn roughly_balanced() {
        // mean of a well-spread sample is near the origin
        let dirs = sphere_directions(3, 512, 1);
        let mean = dirs.iter().fold(DVector::zeros(3), |acc, v| acc + v) / 512.0;
        assert!(mean.norm() < 0.05, "{mean}");
    }

    #[test]
    fn radical_inverse_base2() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
