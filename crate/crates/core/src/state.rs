//! States on `M_n` as density matrices; vector states keep their vector.

use crate::error::{Error, Result};
use crate::matrix::{Operator, Vector, C64};
use crate::spectral::{min_eigenvalue, psd_sqrt};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct State {
    density: Operator,
    vector: Option<Vector>,
}

impl State {
    /// Vector state `X ↦ ⟨Ψ, XΨ⟩`.
    pub fn vector(psi: Vector, tol: &ToleranceConfig) -> Result<State> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > tol.eps_zero {
            return Err(Error::NonUnitVector(norm));
        }
        Ok(State {
            density: Operator::projector(&psi),
            vector: Some(psi),
        })
    }

    /// Normalizes `psi` before building the vector state.
    pub fn from_unnormalized(psi: Vector) -> Result<State> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonUnitVector(norm));
        }
        let psi = psi / C64::new(norm, 0.0);
        Ok(State {
            density: Operator::projector(&psi),
            vector: Some(psi),
        })
    }

    pub fn from_density(density: Operator, tol: &ToleranceConfig) -> Result<State> {
        if !density.is_hermitian(tol.eps_zero) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = density.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.eps_zero {
            return Err(Error::InvalidDensity(format!("trace {} != 1", tr.re)));
        }
        let lowest = min_eigenvalue(&density);
        if lowest < -tol.eps_zero {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:.3e}")));
        }
        Ok(State {
            density: density.hermitian_part(),
            vector: None,
        })
    }

    /// Normalized trace `tr(X)/n`.
    pub fn tracial(n: usize) -> State {
        State {
            density: Operator::identity(n).scale_real(1.0 / n as f64),
            vector: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }

    pub fn density(&self) -> &Operator {
        &self.density
    }

    pub fn inducing_vector(&self) -> Option<&Vector> {
        self.vector.as_ref()
    }

    /// `φ(X)`
    pub fn expect(&self, x: &Operator) -> C64 {
        match &self.vector {
            Some(psi) => psi.dotc(&x.apply(psi)),
            None => self.density.matrix().transpose().dot(x.matrix()),
        }
    }

    /// `φ(X*X)`, evaluated as a sum of nonnegative terms.
    pub fn modulus(&self, x: &Operator) -> f64 {
        match &self.vector {
            Some(psi) => x.apply(psi).norm_squared(),
            None => {
                let root = psd_sqrt(&self.density);
                (x * &root).fro_norm().powi(2)
            }
        }
    }

    /// `‖π(X)Ω‖` in the GNS representation of this state, computed without
    /// building the representation: `‖XΨ‖` or `‖X ρ^{1/2}‖_F`.
    pub fn gns_norm(&self, x: &Operator) -> f64 {
        self.modulus(x).sqrt()
    }

    /// `φ_U(X) = φ(U* X U)`, i.e. `ρ ↦ U ρ U*` and `Ψ ↦ UΨ`.
    pub fn transformed(&self, u: &Operator, tol: &ToleranceConfig) -> Result<State> {
        let residual = u.unitary_residual();
        if residual > tol.eps_zero * u.fro_norm().max(1.0) {
            return Err(Error::NotUnitary(residual));
        }
        let density = (&(u * &self.density) * &u.adjoint()).hermitian_part();
        Ok(State {
            density,
            vector: self.vector.as_ref().map(|psi| u.apply(psi)),
        })
    }
}
