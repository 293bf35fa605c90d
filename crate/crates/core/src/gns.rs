//! GNS representation of a subalgebra in a state.
//!
//! The quotient space `A / {X : φ(X*X) = 0}` is realized concretely inside the
//! Hilbert-Schmidt space: `[X] ↦ X ρ^{1/2}` is isometric, because
//! `tr(ρ^{1/2} X* Y ρ^{1/2}) = φ(X*Y)`. An orthonormal basis of the image comes
//! from the eigenvectors of the Gram matrix `φ(Bᵢ* Bⱼ)` with eigenvalues above
//! the rank cutoff.

use nalgebra::DMatrix;

use crate::algebra::StarAlgebra;
use crate::matrix::{Operator, Vector, C64};
use crate::spectral::{eigh, psd_sqrt};
use crate::state::State;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct GnsRepresentation {
    /// Orthonormal frame `ξₐ = Σⱼ (uₐ)ⱼ Bⱼ ρ^{1/2} / √λₐ` of the GNS space.
    frame: Vec<Operator>,
    /// Coordinates of `Ω = [I]` in the frame.
    cyclic: Vector,
    /// Eigenvalues of the Gram matrix, descending.
    gram_spectrum: Vec<f64>,
}

/// Builds `(π, H, Ω)` for `state` restricted to `algebra`.
pub fn gns_construct(algebra: &StarAlgebra, state: &State, tol: &ToleranceConfig) -> GnsRepresentation {
    let root = psd_sqrt(state.density());
    let images: Vec<Operator> = algebra.basis().iter().map(|b| b * &root).collect();
    let d = images.len();
    let gram = DMatrix::from_fn(d, d, |i, j| images[i].inner(&images[j]));
    let (values, vectors) = eigh(&Operator::from_matrix_unchecked(gram));
    let top = values.iter().cloned().fold(0.0, f64::max);
    let cut = tol.eps_rank * top.max(1.0);

    let mut frame = Vec::new();
    let mut gram_spectrum = Vec::new();
    for k in (0..d).rev() {
        gram_spectrum.push(values[k]);
        if values[k] <= cut {
            continue;
        }
        let n = state.dim();
        let mut xi = Operator::zeros(n);
        for j in 0..d {
            xi = xi + images[j].scale(vectors[(j, k)]);
        }
        frame.push(xi.scale_real(1.0 / values[k].sqrt()));
    }
    let cyclic = Vector::from_iterator(frame.len(), frame.iter().map(|xi| xi.inner(&root)));
    GnsRepresentation {
        frame,
        cyclic,
        gram_spectrum,
    }
}

impl GnsRepresentation {
    /// Dimension of the GNS space, the numerical rank of the Gram matrix.
    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn cyclic_vector(&self) -> &Vector {
        &self.cyclic
    }

    pub fn gram_spectrum(&self) -> &[f64] {
        &self.gram_spectrum
    }

    /// `π(X)` as a matrix on the GNS space, `π(X)ₐᵦ = ⟨ξₐ, X ξᵦ⟩`.
    pub fn represent(&self, x: &Operator) -> Operator {
        let moved: Vec<Operator> = self.frame.iter().map(|xi| x * xi).collect();
        let k = self.dim();
        Operator::from_matrix_unchecked(DMatrix::from_fn(k, k, |a, b| self.frame[a].inner(&moved[b])))
    }

    /// `π(X) Ω`
    pub fn act_on_cyclic(&self, x: &Operator) -> Vector {
        self.represent(x).apply(&self.cyclic)
    }

    /// Largest deviation in `⟨Ω, π(X)Ω⟩ = φ(X)` and `‖π(X)Ω‖² = φ(X*X)` over
    /// the basis of `algebra`.
    pub fn contract_residual(&self, algebra: &StarAlgebra, state: &State) -> f64 {
        let mut worst = 0.0f64;
        for x in algebra.basis() {
            let v = self.act_on_cyclic(x);
            worst = worst.max((self.cyclic.dotc(&v) - state.expect(x)).norm());
            worst = worst.max((v.norm_squared() - state.modulus(x)).abs());
        }
        worst
    }

    /// Largest deviation from `π(XY) = π(X)π(Y)` and `π(X*) = π(X)*` over basis pairs.
    pub fn homomorphism_residual(&self, algebra: &StarAlgebra) -> f64 {
        let reps: Vec<Operator> = algebra.basis().iter().map(|x| self.represent(x)).collect();
        let mut worst = 0.0f64;
        for (i, x) in algebra.basis().iter().enumerate() {
            worst = worst.max((&reps[i] - &self.represent(&x.adjoint()).adjoint()).fro_norm());
            for (j, y) in algebra.basis().iter().enumerate() {
                let product = self.represent(&(x * y));
                worst = worst.max((&product - &(&reps[i] * &reps[j])).fro_norm());
            }
        }
        worst
    }

    /// `π(I)` is the identity of the GNS space.
    pub fn unit_residual(&self, n: usize) -> f64 {
        let k = self.dim();
        (self.represent(&Operator::identity(n)) - Operator::identity(k.max(1))).fro_norm()
    }

    /// Whether `Ω` is cyclic: `{π(X)Ω}` spans the whole space.
    pub fn cyclic_rank(&self, algebra: &StarAlgebra, tol: &ToleranceConfig) -> usize {
        let k = self.dim();
        let cols: Vec<Vector> = algebra.basis().iter().map(|x| self.act_on_cyclic(x)).collect();
        if k == 0 || cols.is_empty() {
            return 0;
        }
        let m = DMatrix::<C64>::from_fn(k, cols.len(), |i, j| cols[j][i]);
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > tol.eps_rank * top.max(1.0)).count()
    }
}
