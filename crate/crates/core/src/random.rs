//! Seeded random operators and states for sampling and property tests.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{Operator, Vector, C64};
use crate::spectral::unitary_exp;

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / std::f64::consts::SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    Operator::from_fn(n, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    ginibre(rng, n).hermitian_part()
}

/// `exp(iH)` for a Gaussian Hermitian `H` scaled to cover the unitary group
/// well in small dimensions.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    unitary_exp(&hermitian(rng, n).scale_real(2.0), 1.0)
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Random density matrix of the given rank supported in the range of `support`
/// (an isometry's column space, given as a list of orthonormal vectors).
pub fn density_on<R: Rng + ?Sized>(rng: &mut R, support: &[Vector], rank: usize) -> Operator {
    let n = support[0].len();
    let mut rho = Operator::zeros(n);
    for _ in 0..rank.max(1) {
        let mut v = DVector::zeros(n);
        for s in support {
            v += s * complex_normal(rng);
        }
        rho = rho + Operator::projector(&v);
    }
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}
