//! Spectral and polar decompositions, and the functional calculus built on them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{Operator, Vector, C64};
use crate::tolerance::ToleranceConfig;

/// One eigenvalue cluster of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectralComponent {
    pub eigenvalue: f64,
    pub projection: Operator,
}

/// Spectral resolution `H = Σ λᵢ Pᵢ` with distinct eigenvalues in ascending
/// order and mutually orthogonal projections summing to the identity.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub components: Vec<SpectralComponent>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.eigenvalue).collect()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `f(H) = Σ f(λᵢ) Pᵢ`
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.components[0].projection.dim();
        self.components
            .iter()
            .fold(Operator::zeros(n), |acc, c| acc + c.projection.scale(f(c.eigenvalue)))
    }

    pub fn reconstruct(&self) -> Operator {
        self.apply(|x| C64::new(x, 0.0))
    }
}

/// Raw Hermitian eigendecomposition: ascending eigenvalues with one
/// orthonormal eigenvector per column.
pub fn eigh(h: &Operator) -> (Vec<f64>, DMatrix<C64>) {
    let sym = h.hermitian_part().into_matrix();
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let n = h.dim();
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Clusters eigenvalues closer than `eps_rank * max(1, spectral radius)`.
pub fn spectral_decomposition(h: &Operator, tol: &ToleranceConfig) -> Result<Spectrum> {
    let residual = h.hermitian_residual();
    if residual > tol.eps_zero * h.fro_norm().max(1.0) {
        return Err(Error::NotHermitian(residual));
    }
    let (values, vectors) = eigh(h);
    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = tol.eps_rank * radius.max(1.0);
    let n = h.dim();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..values.len() {
        match groups.last_mut() {
            Some(g) if values[k] - values[*g.last().unwrap()] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    let components = groups
        .into_iter()
        .map(|g| {
            let eigenvalue = g.iter().map(|&k| values[k]).sum::<f64>() / g.len() as f64;
            let mut p = DMatrix::<C64>::zeros(n, n);
            for &k in &g {
                let v = vectors.column(k);
                p += &v * v.adjoint();
            }
            SpectralComponent {
                eigenvalue,
                projection: Operator::from_matrix_unchecked(p),
            }
        })
        .collect();
    Ok(Spectrum { components })
}

/// `exp(i t H)` for Hermitian `H`, computed in the eigenbasis.
pub fn unitary_exp(h: &Operator, t: f64) -> Operator {
    let (values, vectors) = eigh(h);
    let phases = DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| C64::from_polar(1.0, t * x)),
    );
    Operator::from_matrix_unchecked(&vectors * DMatrix::from_diagonal(&phases) * vectors.adjoint())
}

/// Square root of a positive semidefinite operator; negative eigenvalues from
/// rounding are clipped to zero.
pub fn psd_sqrt(h: &Operator) -> Operator {
    let (values, vectors) = eigh(h);
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| C64::new(x.max(0.0).sqrt(), 0.0)),
    );
    Operator::from_matrix_unchecked(&vectors * DMatrix::from_diagonal(&roots) * vectors.adjoint())
}

/// `T = V |T|` with `V` a partial isometry whose initial projection `V*V` is
/// the support projection of `|T|`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub isometry: Operator,
    pub modulus: Operator,
}

/// Polar decomposition through the SVD `T = U Σ W*`: `|T| = W Σ W*` and
/// `V = U_r W_r*` over singular values above `eps_rank * σ_max`.
pub fn polar_decomposition(t: &Operator, tol: &ToleranceConfig) -> PolarDecomposition {
    let n = t.dim();
    let svd = crate::svd::svd(t.matrix());
    let (u, w, sigma) = (svd.u, svd.v, svd.singular_values);
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);

    if sigma_max <= tol.eps_zero {
        return PolarDecomposition {
            isometry: Operator::zeros(n),
            modulus: Operator::zeros(n),
        };
    }

    let cut = tol.eps_rank * sigma_max;
    let mut v = DMatrix::<C64>::zeros(n, n);
    let mut modulus = DMatrix::<C64>::zeros(n, n);
    for k in 0..sigma.len() {
        let wk = w.column(k);
        modulus += &wk * wk.adjoint() * C64::new(sigma[k], 0.0);
        if sigma[k] > cut {
            v += u.column(k) * wk.adjoint();
        }
    }
    PolarDecomposition {
        isometry: Operator::from_matrix_unchecked(v),
        modulus: Operator::from_matrix_unchecked(modulus).hermitian_part(),
    }
}

/// Largest singular value of `X` with its left singular vector.
pub fn top_left_singular_vector(x: &Operator) -> (f64, Vector) {
    let svd = crate::svd::svd(x.matrix());
    (svd.max_singular_value(), svd.u.column(0).into_owned())
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(h: &Operator) -> f64 {
    eigh(h).0.first().cloned().unwrap_or(0.0)
}
