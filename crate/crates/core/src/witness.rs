//! Construction of an EPR state for incommensurable pairs from two commuting
//! non-abelian subalgebras.
//!
//! In each factor pick non-commuting projections `R, S`, set `T = (I − R)SR`
//! and take the partial isometry `V` of its polar decomposition. Then
//! `V² = 0`, `VV* ⊥ V*V`, and `E = VV*`, `F = ½(VV* + V*V + V + V*)` are
//! projections that do not commute. A unit vector `Ψ₁` in the range of
//! `E₁E₂` together with its image `V*W*Ψ₁` gives
//! `Ψ = (Ψ₁ + V*W*Ψ₁)/√2`, which is EPR for `(E₁, E₂)` and `(F₁, F₂)`.

use serde::Serialize;

use crate::algebra::{find_noncommuting_projections, StarAlgebra};
use crate::epr::CommutingPair;
use crate::error::{Error, Result};
use crate::matrix::{fix_phase, Operator, Vector, C64};
use crate::spectral::{polar_decomposition, top_left_singular_vector};
use crate::state::State;
use crate::tolerance::ToleranceConfig;

/// Projections and partial isometry produced inside one factor.
#[derive(Debug, Clone)]
pub struct FactorData {
    pub r: Operator,
    pub s: Operator,
    pub isometry: Operator,
    pub e: Operator,
    pub f: Operator,
}

fn factor_data(b: &StarAlgebra, tol: &ToleranceConfig) -> Result<FactorData> {
    let n = b.ambient_dim();
    let (r, s) = find_noncommuting_projections(b, tol)?;
    let id = Operator::identity(n);
    let t = &(&(&id - &r) * &s) * &r;
    let v = polar_decomposition(&t, tol).isometry;
    let vd = v.adjoint();
    let final_proj = &v * &vd;
    let initial_proj = &vd * &v;
    let f = (&(&(&final_proj + &initial_proj) + &v) + &vd).scale_real(0.5).hermitian_part();
    Ok(FactorData {
        r,
        s,
        isometry: v,
        e: final_proj.hermitian_part(),
        f,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessCommutator {
    pub pair: &'static str,
    pub n: usize,
    pub m: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct EprWitness {
    pub first: FactorData,
    pub second: FactorData,
    pub psi: Vector,
    pub state: State,
    /// `φ(|[E_jⁿ, F_jᵐ]|²)`; projections make `n = m = 1` exhaustive.
    pub commutator_moduli: Vec<WitnessCommutator>,
}

/// Numbers the witness invariants are stated in.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessMeasurements {
    /// `φ(E₁), φ(E₂), φ(E₁E₂), φ(F₁), φ(F₂), φ(F₁F₂)`
    pub expectations: [f64; 6],
    pub e_moment: f64,
    pub f_moment: f64,
    pub moduli: [f64; 2],
    pub product_norm: f64,
}

pub const EXPECTATION_LABELS: [&str; 6] = ["E1", "E2", "E1E2", "F1", "F2", "F1F2"];

impl EprWitness {
    /// Runs the construction without verifying the postconditions.
    pub fn build(n1: &StarAlgebra, n2: &StarAlgebra, tol: &ToleranceConfig) -> Result<EprWitness> {
        if n1.ambient_dim() != n2.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: n1.ambient_dim(),
                found: n2.ambient_dim(),
            });
        }
        let cross = n1.max_cross_commutator(n2);
        if cross >= tol.eps_zero {
            return Err(Error::NonCommutingFactors(cross));
        }
        let first = factor_data(n1, tol)?;
        let second = factor_data(n2, tol)?;

        let product = &first.e * &second.e;
        let (top, psi1) = top_left_singular_vector(&product);
        if top <= tol.eps_zero {
            return Err(Error::SchliederFailure(top));
        }
        let psi1 = fix_phase(&psi1);
        let partner = first.isometry.adjoint().apply(&second.isometry.adjoint().apply(&psi1));
        let psi = (&psi1 + &partner) / C64::new(2f64.sqrt(), 0.0);
        let state = State::from_unnormalized(psi.clone())?;
        let psi = state.inducing_vector().cloned().unwrap_or(psi);

        let commutator_moduli = vec![
            WitnessCommutator {
                pair: "E1,F1",
                n: 1,
                m: 1,
                value: state.modulus(&first.e.commutator(&first.f)),
            },
            WitnessCommutator {
                pair: "E2,F2",
                n: 1,
                m: 1,
                value: state.modulus(&second.e.commutator(&second.f)),
            },
        ];
        Ok(EprWitness {
            first,
            second,
            psi,
            state,
            commutator_moduli,
        })
    }

    pub fn measurements(&self) -> WitnessMeasurements {
        let phi = &self.state;
        let (e1, f1) = (&self.first.e, &self.first.f);
        let (e2, f2) = (&self.second.e, &self.second.f);
        WitnessMeasurements {
            expectations: [
                phi.expect(e1).re,
                phi.expect(e2).re,
                phi.expect(&(e1 * e2)).re,
                phi.expect(f1).re,
                phi.expect(f2).re,
                phi.expect(&(f1 * f2)).re,
            ],
            e_moment: phi.modulus(&(e1 - e2)),
            f_moment: phi.modulus(&(f1 - f2)),
            moduli: [self.commutator_moduli[0].value, self.commutator_moduli[1].value],
            product_norm: (e1 * e2).norm(),
        }
    }

    /// Failed postconditions, empty when the witness is valid.
    pub fn violations(&self, tol: &ToleranceConfig) -> Vec<String> {
        let m = self.measurements();
        let mut out = Vec::new();
        for (label, value) in EXPECTATION_LABELS.iter().zip(m.expectations) {
            if (value - 0.5).abs() >= tol.eps_zero {
                out.push(format!("phi({label}) = {value:.15e}, expected 1/2"));
            }
        }
        if m.e_moment >= tol.eps_zero {
            out.push(format!("phi((E1-E2)^2) = {:.3e}", m.e_moment));
        }
        if m.f_moment >= tol.eps_zero {
            out.push(format!("phi((F1-F2)^2) = {:.3e}", m.f_moment));
        }
        for c in &self.commutator_moduli {
            if c.value <= tol.eps_zero {
                out.push(format!("phi(|[{}]|^2) = {:.3e} vanishes", c.pair, c.value));
            }
        }
        for (name, p) in [("E1", &self.first.e), ("F1", &self.first.f), ("E2", &self.second.e), ("F2", &self.second.f)] {
            if !p.is_projection(tol.eps_zero.max(f64::EPSILON) * 10.0) {
                out.push(format!("{name} is not a projection"));
            }
        }
        out
    }

    /// `(E₁, E₂)`
    pub fn e_pair(&self, tol: &ToleranceConfig) -> Result<CommutingPair> {
        CommutingPair::new(self.first.e.clone(), self.second.e.clone(), tol)
    }

    /// `(F₁, F₂)`
    pub fn f_pair(&self, tol: &ToleranceConfig) -> Result<CommutingPair> {
        CommutingPair::new(self.first.f.clone(), self.second.f.clone(), tol)
    }
}

/// Builds the witness and verifies every postcondition.
pub fn construct_epr_witness(n1: &StarAlgebra, n2: &StarAlgebra, tol: &ToleranceConfig) -> Result<EprWitness> {
    let w = EprWitness::build(n1, n2, tol)?;
    let v = w.violations(tol);
    if !v.is_empty() {
        return Err(Error::Postcondition(v.join("; ")));
    }
    Ok(w)
}

/// `M_{d_s}` embedded at every site of `region` in the tensor product over
/// `sites`, as a generating set.
pub fn local_generators(sites: &[usize], region: &[usize]) -> Vec<Operator> {
    let mut out = Vec::new();
    for &s in region {
        for g in StarAlgebra::full(sites[s]).basis() {
            let embedded = sites.iter().enumerate().fold(None::<Operator>, |acc, (k, &d)| {
                let factor = if k == s { g.clone() } else { Operator::identity(d) };
                Some(match acc {
                    None => factor,
                    Some(a) => a.kron(&factor),
                })
            });
            out.extend(embedded);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generate_algebra;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn factors(n1: usize, n2: usize) -> (StarAlgebra, StarAlgebra) {
        let sites = [n1, n2];
        let a = generate_algebra(&local_generators(&sites, &[0]), n1 * n2, &tol()).unwrap();
        let b = generate_algebra(&local_generators(&sites, &[1]), n1 * n2, &tol()).unwrap();
        (a, b)
    }

    #[test]
    fn two_qubit_witness_has_half_expectations() {
        let (a, b) = factors(2, 2);
        let w = construct_epr_witness(&a, &b, &tol()).unwrap();
        let m = w.measurements();
        for x in m.expectations {
            assert!((x - 0.5).abs() < 1e-10, "{x}");
        }
        assert!(m.e_moment < 1e-10 && m.f_moment < 1e-10);
    }

    /// Hand oracle: `V² = 0` gives `[E, F] = ½(V − V*)` and
    /// `|[E, F]|² = ¼(VV* + V*V)`. Both `φ(VV*) = φ(E)` and `φ(V*V)` equal 1/2
    /// because `Ψ` splits evenly between the ranges, so the modulus is 1/4.
    #[test]
    fn commutator_moduli_match_hand_value() {
        for (n1, n2) in [(2, 2), (3, 3), (2, 3)] {
            let (a, b) = factors(n1, n2);
            let w = construct_epr_witness(&a, &b, &tol()).unwrap();
            for c in &w.commutator_moduli {
                assert!((c.value - 0.25).abs() < 1e-12, "{} {}", c.pair, c.value);
            }
            let v = &w.first.isometry;
            let hand = (&(v * &v.adjoint()) + &(&v.adjoint() * v)).scale_real(0.25);
            let direct = w.first.e.commutator(&w.first.f).abs_squared();
            assert!(direct.approx_eq(&hand, 1e-12));
        }
    }

    #[test]
    fn larger_and_unequal_factors() {
        for (n1, n2) in [(3, 3), (2, 3), (3, 2)] {
            let (a, b) = factors(n1, n2);
            let w = construct_epr_witness(&a, &b, &tol()).unwrap();
            assert!(w.violations(&tol()).is_empty());
            assert!(w.first.isometry.is_partial_isometry(1e-12));
            assert!((&w.first.isometry * &w.first.isometry).fro_norm() < 1e-12);
        }
    }

    #[test]
    fn abelian_factor_rejected() {
        let (_, b) = factors(2, 2);
        let diag = generate_algebra(&[Operator::diag_real(&[0.0, 1.0]).kron(&Operator::identity(2))], 4, &tol()).unwrap();
        assert!(matches!(construct_epr_witness(&diag, &b, &tol()), Err(Error::AbelianAlgebra)));
    }

    #[test]
    fn overlapping_factors_rejected() {
        let (a, _) = factors(2, 2);
        assert!(matches!(construct_epr_witness(&a, &a, &tol()), Err(Error::NonCommutingFactors(_))));
    }

    #[test]
    fn lattice_regions_with_spectator() {
        let sites = [2, 2, 2];
        let a = generate_algebra(&local_generators(&sites, &[0]), 8, &tol()).unwrap();
        let b = generate_algebra(&local_generators(&sites, &[2]), 8, &tol()).unwrap();
        assert_eq!(a.dim(), 4);
        let w = construct_epr_witness(&a, &b, &tol()).unwrap();
        assert!(w.violations(&tol()).is_empty());
    }
}
