//! Seeded random sampling of group points, algebra elements, momenta and `C^4` vectors.
//!
//! All sweeps draw from [`SampleRng`], ChaCha8 seeded with a `u64` through
//! `SeedableRng::seed_from_u64`, so a seed reproduces the same samples on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::lie::{ALGEBRA_DIM, standard_frame};
use crate::quat::{AlgebraVector, GroupPoint, Quaternion, mat_exp};

pub type SampleRng = rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng))
}

pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        if let Some(q) = random_quaternion(rng).normalized() {
            return q;
        }
    }
}

pub fn random_pure_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::pure(normal(rng), normal(rng), normal(rng))
}

/// Algebra element with i.i.d. `N(0, scale²)` frame components.
pub fn random_algebra<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> AlgebraVector {
    let coeffs: Vec<f64> = (0..ALGEBRA_DIM).map(|_| scale * normal(rng)).collect();
    standard_frame().combine(&coeffs)
}

/// `exp(u)` for a random algebra element with component scale 1.5; covers `Sp(2)`
/// well beyond a neighbourhood of the identity.
pub fn random_group_point<R: Rng + ?Sized>(rng: &mut R) -> GroupPoint {
    mat_exp(&random_algebra(rng, 1.5))
}

/// A uniformly distributed unit vector in `C^4`.
pub fn random_unit_c4<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    loop {
        let z: [Complex64; 4] = std::array::from_fn(|_| Complex64::new(normal(rng), normal(rng)));
        let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return z.map(|c| c / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = random_group_point(&mut rng(42));
        let b = random_group_point(&mut rng(42));
        assert_eq!(a, b);
        assert_ne!(a, random_group_point(&mut rng(43)));
    }

    #[test]
    fn samples_satisfy_constraints() {
        let mut r = rng(1);
        for _ in 0..50 {
            assert!(random_group_point(&mut r).unitarity_defect() < 1e-13);
            assert!((random_unit_quaternion(&mut r).norm() - 1.0).abs() < 1e-15);
            let z = random_unit_c4(&mut r);
            let n: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
    }
}
