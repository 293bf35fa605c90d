//! Dispersion-free states, characters and classicality of a state on a
//! subalgebra.
//!
//! A finite-dimensional *-algebra splits as a direct sum of blocks
//! `M_k ⊗ I_m` indexed by the minimal projections `z` of its center. A
//! multiplicative state has to factor through a block with `k = 1`, where
//! `zX = χ(X) z` for every `X`, so the characters are exactly
//! `χ(X) = tr(zX) / tr(z)` over the one-dimensional blocks. A state is
//! classical on the algebra when its restriction is a convex combination of
//! those characters; that is decided by a nonnegative least-squares solve.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{center, StarAlgebra};
use crate::matrix::{Operator, C64, ONE};
use crate::nnls::nnls;
use crate::spectral::spectral_decomposition;
use crate::state::State;
use crate::tolerance::ToleranceConfig;

/// A linear functional on a subalgebra, given by its values on the basis.
#[derive(Debug, Clone)]
pub struct Functional {
    pub values: Vec<C64>,
}

impl Functional {
    pub fn from_state(state: &State, b: &StarAlgebra) -> Functional {
        Functional {
            values: b.basis().iter().map(|x| state.expect(x)).collect(),
        }
    }

    /// Evaluates on the projection of `x` onto the span of `b`.
    pub fn evaluate(&self, b: &StarAlgebra, x: &Operator) -> C64 {
        b.coordinates(x)
            .iter()
            .zip(&self.values)
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Convex combination `Σ wᵢ ωᵢ`.
    pub fn mixture(parts: &[(f64, &Functional)]) -> Functional {
        let len = parts[0].1.values.len();
        let mut values = vec![C64::new(0.0, 0.0); len];
        for (w, f) in parts {
            for (acc, v) in values.iter_mut().zip(&f.values) {
                *acc += v * *w;
            }
        }
        Functional { values }
    }
}

/// A multiplicative state on a subalgebra.
#[derive(Debug, Clone)]
pub struct Character {
    pub values: Vec<C64>,
    /// Index of the block (minimal central projection) the character factors through.
    pub source_block: usize,
}

impl Character {
    pub fn functional(&self) -> Functional {
        Functional {
            values: self.values.clone(),
        }
    }

    pub fn evaluate(&self, b: &StarAlgebra, x: &Operator) -> C64 {
        self.functional().evaluate(b, x)
    }
}

/// One summand `M_k ⊗ I_m` of the algebra.
#[derive(Debug, Clone)]
pub struct Block {
    pub central_projection: Operator,
    /// `k`, from `dim(zB) = k²`.
    pub matrix_size: usize,
    pub multiplicity: usize,
}

impl Block {
    pub fn is_abelian(&self) -> bool {
        self.matrix_size == 1
    }
}

fn span_dim(elements: &[Operator], eps: f64) -> usize {
    let n = match elements.first() {
        Some(e) => e.dim(),
        None => return 0,
    };
    let m = DMatrix::from_fn(n * n, elements.len(), |r, c| elements[c].matrix()[r]);
    crate::svd::svd(&m).rank(eps)
}

/// Minimal central projections and the size of the matrix block under each.
///
/// The minimal projections are found by refining `{I}` with the spectral
/// projections of every Hermitian basis element of the center.
pub fn block_decomposition(b: &StarAlgebra, tol: &ToleranceConfig) -> Vec<Block> {
    let n = b.ambient_dim();
    let z = center(b, tol);
    let mut parts = vec![Operator::identity(n)];
    for h in z.basis() {
        let spectrum = match spectral_decomposition(h, tol) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if spectrum.len() < 2 {
            continue;
        }
        let mut refined = Vec::new();
        for p in &parts {
            for c in &spectrum.components {
                let q = (p * &c.projection).hermitian_part();
                if q.trace().re > 0.5 {
                    refined.push(q);
                }
            }
        }
        parts = refined;
    }
    parts
        .into_iter()
        .map(|p| {
            let compressed: Vec<Operator> = b.basis().iter().map(|x| &p * x).collect();
            let dim = span_dim(&compressed, tol.eps_rank).max(1);
            let k = (dim as f64).sqrt().round().max(1.0) as usize;
            let rank = p.trace().re.round() as usize;
            Block {
                central_projection: p,
                matrix_size: k,
                multiplicity: (rank / k).max(1),
            }
        })
        .collect()
}

/// All characters of `b`, one per one-dimensional block.
pub fn characters(b: &StarAlgebra, tol: &ToleranceConfig) -> Vec<Character> {
    block_decomposition(b, tol)
        .into_iter()
        .enumerate()
        .filter(|(_, block)| block.is_abelian())
        .map(|(idx, block)| {
            let z = &block.central_projection;
            let tr = z.trace();
            Character {
                values: b.basis().iter().map(|x| (z * x).trace() / tr).collect(),
                source_block: idx,
            }
        })
        .collect()
}

/// Largest deviation from `ω(XY) = ω(X)ω(Y)` over basis pairs and from `ω(I) = 1`.
pub fn multiplicativity_residual(omega: &Functional, b: &StarAlgebra) -> f64 {
    let n = b.ambient_dim();
    let mut worst = (omega.evaluate(b, &Operator::identity(n)) - ONE).norm();
    for (i, x) in b.basis().iter().enumerate() {
        for (j, y) in b.basis().iter().enumerate() {
            let lhs = omega.evaluate(b, &(x * y));
            let rhs = omega.values[i] * omega.values[j];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Multiplicative and unital on the basis, hence dispersion-free.
pub fn dispersion_free_check(omega: &Functional, b: &StarAlgebra, tol: &ToleranceConfig) -> bool {
    multiplicativity_residual(omega, b) <= tol.eps_zero
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalityCertificate {
    pub classical: bool,
    /// Weights over `characters`, present iff classical.
    pub weights: Option<Vec<f64>>,
    pub residual: f64,
    #[serde(skip)]
    pub characters: Vec<Character>,
}

/// Decides whether `state` restricted to `b` is a mixture of characters.
///
/// Unknowns are nonnegative weights over the characters; equations are
/// `Σ wᵢ χᵢ(Bₖ) = φ(Bₖ)` split into real and imaginary parts, plus
/// `Σ wᵢ = 1`. Classical iff the least-squares residual is below `eps_feas`.
pub fn classicality_check(
    state: &State,
    b: &StarAlgebra,
    tol: &ToleranceConfig,
) -> ClassicalityCertificate {
    let chars = characters(b, tol);
    let target = Functional::from_state(state, b);
    let d = b.dim();
    let rows = 2 * d + 1;
    let mut rhs = DVector::<f64>::zeros(rows);
    for (k, v) in target.values.iter().enumerate() {
        rhs[2 * k] = v.re;
        rhs[2 * k + 1] = v.im;
    }
    rhs[2 * d] = 1.0;

    if chars.is_empty() {
        return ClassicalityCertificate {
            classical: false,
            weights: None,
            residual: rhs.norm(),
            characters: chars,
        };
    }

    let a = DMatrix::from_fn(rows, chars.len(), |r, c| {
        if r == 2 * d {
            1.0
        } else if r % 2 == 0 {
            chars[c].values[r / 2].re
        } else {
            chars[c].values[r / 2].im
        }
    });
    let sol = nnls(&a, &rhs);
    let total: f64 = sol.x.iter().sum();
    let classical = sol.residual < tol.eps_feas && (total - 1.0).abs() < tol.eps_feas;
    ClassicalityCertificate {
        classical,
        weights: classical.then(|| sol.x.iter().cloned().collect()),
        residual: sol.residual,
        characters: chars,
    }
}
