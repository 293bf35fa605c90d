//! Random instances shared by the integration tests.
#![allow(dead_code)]

use beable_lab::matrix::{Vector, C64};
use beable_lab::random;
use beable_lab::state::State;
use beable_lab::{generate_algebra, Operator, StarAlgebra, ToleranceConfig};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `U (⊕ M_k ⊗ I_m) U*` of total size `n` with a known layout.
pub struct BlockAlgebra {
    pub algebra: StarAlgebra,
    /// Orthonormal bases of the ranges of the one-dimensional blocks.
    pub abelian_ranges: Vec<Vec<Vector>>,
    /// `(k, m)` per block.
    pub layout: Vec<(usize, usize)>,
}

impl BlockAlgebra {
    pub fn is_abelian(&self) -> bool {
        self.layout.iter().all(|&(k, _)| k == 1)
    }

    /// `Σ k²`
    pub fn dim(&self) -> usize {
        self.layout.iter().map(|&(k, _)| k * k).sum()
    }
}

pub fn random_block_algebra(rng: &mut ChaCha8Rng, n: usize) -> BlockAlgebra {
    let u = random::unitary(rng, n);
    let mut gens = Vec::new();
    let mut abelian_ranges = Vec::new();
    let mut layout = Vec::new();
    let mut offset = 0;
    while offset < n {
        let left = n - offset;
        let k = rng.random_range(1..=left.min(3));
        let m = rng.random_range(1..=left / k);
        for i in 0..k {
            for j in 0..k {
                let mut g = DMatrix::<C64>::zeros(n, n);
                for p in 0..m {
                    g[(offset + i * m + p, offset + j * m + p)] = C64::new(1.0, 0.0);
                }
                gens.push(Operator::new(g).unwrap());
            }
        }
        if k == 1 {
            abelian_ranges.push((offset..offset + m).map(|c| u.matrix().column(c).into_owned()).collect());
        }
        layout.push((k, m));
        offset += k * m;
    }
    let gens: Vec<Operator> = gens.iter().map(|g| &(&u * g) * &u.adjoint()).collect();
    BlockAlgebra {
        algebra: generate_algebra(&gens, n, &ToleranceConfig::default()).unwrap(),
        abelian_ranges,
        layout,
    }
}

pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> State {
    let g = random::ginibre(rng, n);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    State::from_density(rho.scale_real(1.0 / tr), &ToleranceConfig::default()).unwrap()
}
