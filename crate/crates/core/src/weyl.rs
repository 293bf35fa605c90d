//! Clock-and-shift systems on `ℂ^d` and their maximally entangled offset
//! states, standing in for position and momentum.
//!
//! `Z = diag(1, ω, …, ω^{d−1})`, `X|k⟩ = |k+1⟩` with `ω = e^{2πi/d}` satisfy
//! `ZX = ωXZ`, hence `Z^a X^b = ω^{ab} X^b Z^a`. The state
//! `Ψ = (I ⊗ X^{−u} Z^{−v}) d^{−1/2} Σₖ |k⟩|k⟩` has
//! `φ(Zᵗ ⊗ Z^{−t}) = ω^{ut}` and `φ(Xˢ ⊗ Xˢ) = ω^{vs}`.

use serde::Serialize;

use crate::algebra::generate_algebra;
use crate::beable::{verify_partner_commutation, MeasurementContext, PartnerCommutation, VerifyOptions};
use crate::epr::{is_epr_state, CommutingPair, EprDiagnostics};
use crate::error::{Error, Result};
use crate::matrix::{Operator, Vector, C64, ZERO};
use crate::state::State;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone)]
pub struct WeylSystem {
    d: usize,
    clock: Operator,
    shift: Operator,
}

impl WeylSystem {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let mut diag = Vec::with_capacity(d);
        for k in 0..d {
            diag.push(root_of_unity(d, k as i64));
        }
        let clock = Operator::diag(&diag);
        let shift = Operator::from_fn(d, |i, j| if i == (j + 1) % d { C64::new(1.0, 0.0) } else { ZERO });
        Ok(WeylSystem { d, clock, shift })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `ω^k`
    pub fn omega(&self, k: i64) -> C64 {
        root_of_unity(self.d, k)
    }

    pub fn clock(&self) -> &Operator {
        &self.clock
    }

    pub fn shift(&self) -> &Operator {
        &self.shift
    }

    /// `Z^k` for any integer `k`, reduced mod `d`.
    pub fn clock_pow(&self, k: i64) -> Operator {
        self.clock.powi(k.rem_euclid(self.d as i64) as usize)
    }

    pub fn shift_pow(&self, k: i64) -> Operator {
        self.shift.powi(k.rem_euclid(self.d as i64) as usize)
    }

    /// `‖ZX − ωXZ‖`
    pub fn weyl_residual(&self) -> f64 {
        let zx = &self.clock * &self.shift;
        let xz = (&self.shift * &self.clock).scale(self.omega(1));
        (zx - xz).norm()
    }

    /// `max(‖Z^d − I‖, ‖X^d − I‖)`
    pub fn order_residual(&self) -> f64 {
        let id = Operator::identity(self.d);
        let z = (&self.clock.powi(self.d) - &id).norm();
        let x = (&self.shift.powi(self.d) - &id).norm();
        z.max(x)
    }

    /// `X ↦ X ⊗ I`
    pub fn first(&self, x: &Operator) -> Operator {
        x.kron(&Operator::identity(self.d))
    }

    /// `X ↦ I ⊗ X`
    pub fn second(&self, x: &Operator) -> Operator {
        Operator::identity(self.d).kron(x)
    }
}

/// `e^{2πik/d}` from the reduced exponent, so that equal residues give
/// bitwise equal values.
fn root_of_unity(d: usize, k: i64) -> C64 {
    let r = k.rem_euclid(d as i64) as f64;
    let theta = 2.0 * std::f64::consts::PI * r / d as f64;
    C64::new(theta.cos(), theta.sin())
}

#[derive(Debug, Clone)]
pub struct FiniteEprState {
    pub system: WeylSystem,
    pub u: i64,
    pub v: i64,
    pub psi: Vector,
    pub state: State,
}

impl FiniteEprState {
    pub fn new(d: usize, u: i64, v: i64) -> Result<Self> {
        let system = WeylSystem::new(d)?;
        let u = u.rem_euclid(d as i64);
        let v = v.rem_euclid(d as i64);
        let root = 1.0 / (d as f64).sqrt();
        let phi = Vector::from_fn(d * d, |i, _| if i / d == i % d { C64::new(root, 0.0) } else { ZERO });
        let offset = &system.shift_pow(-u) * &system.clock_pow(-v);
        let psi = system.second(&offset).apply(&phi);
        let state = State::from_unnormalized(psi.clone())?;
        Ok(FiniteEprState {
            system,
            u,
            v,
            psi,
            state,
        })
    }

    pub fn d(&self) -> usize {
        self.system.d()
    }

    /// Largest deviation from `φ(Zᵗ⊗Z^{−t}) = ω^{ut}` and `φ(Xˢ⊗Xˢ) = ω^{vs}`
    /// over the full grid `t, s ∈ ℤ_d`.
    pub fn correlator_residual(&self) -> f64 {
        let sys = &self.system;
        let mut worst = 0.0f64;
        for t in 0..self.d() as i64 {
            let zz = &sys.first(&sys.clock_pow(t)) * &sys.second(&sys.clock_pow(-t));
            worst = worst.max((self.state.expect(&zz) - sys.omega(self.u * t)).norm());
            let xx = &sys.first(&sys.shift_pow(t)) * &sys.second(&sys.shift_pow(t));
            worst = worst.max((self.state.expect(&xx) - sys.omega(self.v * t)).norm());
        }
        worst
    }

    /// `Q ⊗ I` with `Q = diag(0, 1, …, d−1)`.
    pub fn clock_observable(&self) -> Operator {
        let d = self.d();
        self.system.first(&Operator::diag_real(&(0..d).map(|k| k as f64).collect::<Vec<_>>()))
    }

    /// `I ⊗ Q'` with `Q'|j⟩ = ((j + u) mod d)|j⟩`, the second-side observable
    /// perfectly correlated with the first-side clock.
    pub fn offset_clock_observable(&self) -> Operator {
        let d = self.d() as i64;
        let values: Vec<f64> = (0..d).map(|j| ((j + self.u).rem_euclid(d)) as f64).collect();
        self.system.second(&Operator::diag_real(&values))
    }

    /// `φ(|[Z₂ᵃ, X₂ᵇ]|²)`
    pub fn commutator_modulus(&self, a: i64, b: i64) -> f64 {
        self.state.modulus(&self.second_side_commutator(a, b))
    }

    fn second_side_commutator(&self, a: i64, b: i64) -> Operator {
        let sys = &self.system;
        sys.second(&sys.clock_pow(a)).commutator(&sys.second(&sys.shift_pow(b)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylExclusion {
    pub d: usize,
    pub a: i64,
    pub b: i64,
    /// `φ(|[Z₂ᵃ, X₂ᵇ]|²)`
    pub measured_modulus: f64,
    /// `|1 − ω^{ab}| = 2|sin(πab/d)|`
    pub contradiction_magnitude: f64,
    /// `‖[Z₂ᵃ, X₂ᵇ]Ψ‖`, equal to the magnitude because `X₂ᵇZ₂ᵃ` is unitary.
    pub numeric_magnitude: f64,
    pub correlator_residual: f64,
    pub epr: EprDiagnostics,
    pub partner_commutation: Option<PartnerCommutation>,
    pub partner_commutation_error: Option<String>,
}

/// If a beable algebra for the first-side clock contained the second-side
/// clock and shift powers, `φ(|[Z₂ᵃ, X₂ᵇ]|²)` would vanish. The Weyl relation
/// turns `[Z₂ᵃ, X₂ᵇ]Ψ` into `(ω^{ab} − 1)` times a unit vector, so it cannot.
///
/// The premise chain reuses the general verifiers: the state is EPR for the
/// first-side clock and the offset second-side clock, and the partner
/// commutation check runs on the algebra they generate.
pub fn weyl_exclusion(
    state: &FiniteEprState,
    a: i64,
    b: i64,
    options: &VerifyOptions,
    tol: &ToleranceConfig,
) -> Result<WeylExclusion> {
    let d = state.d();
    if (a * b).rem_euclid(d as i64) == 0 {
        return Err(Error::DegenerateChoice(a * b, d));
    }
    let measured_modulus = state.commutator_modulus(a, b);
    let analytic = (C64::new(1.0, 0.0) - state.system.omega(a * b)).norm();
    let numeric = state.second_side_commutator(a, b).apply(&state.psi).norm();

    let q1 = state.clock_observable();
    let q2 = state.offset_clock_observable();
    let pair = CommutingPair::new(q1.clone(), q2.clone(), tol)?;
    let epr = is_epr_state(&state.state, &pair, &options.time_grid, tol)?;
    let ctx = MeasurementContext::new(state.state.clone(), q1.clone(), tol)?;
    let algebra = generate_algebra(&[q1, q2.clone()], d * d, tol)?;
    let (partner_commutation, partner_commutation_error) = match verify_partner_commutation(&ctx, &q2, &algebra, options, tol) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(WeylExclusion {
        d,
        a,
        b,
        measured_modulus,
        contradiction_magnitude: analytic,
        numeric_magnitude: numeric,
        correlator_residual: state.correlator_residual(),
        epr,
        partner_commutation,
        partner_commutation_error,
    })
}

/// `φ(|f(Q ⊗ I) − f(I ⊗ Q')|²)` for functions `f : ℤ_d → ℂ` given by their
/// values.
pub fn finite_ap_transport(state: &FiniteEprState, functions: &[Vec<C64>]) -> Result<Vec<f64>> {
    let d = state.d();
    functions
        .iter()
        .map(|f| {
            if f.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: f.len(),
                });
            }
            let first = state.system.first(&Operator::diag(f));
            let shifted: Vec<C64> = (0..d as i64).map(|j| f[(j + state.u).rem_euclid(d as i64) as usize]).collect();
            let second = state.system.second(&Operator::diag(&shifted));
            Ok(state.state.modulus(&(&first - &second)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn qubit_case_is_pauli() {
        let w = WeylSystem::new(2).unwrap();
        assert!(w.clock().approx_eq(&pauli::z(), 1e-15));
        assert_eq!(w.shift(), &pauli::x());
        assert!((w.omega(1) + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn weyl_relation_and_order() {
        for d in 2..=16 {
            let w = WeylSystem::new(d).unwrap();
            assert!(w.weyl_residual() < 1e-13, "d = {d}");
            assert!(w.order_residual() < 1e-12);
            assert!(w.clock().is_unitary(1e-14) && w.shift().is_unitary(1e-14));
        }
    }

    #[test]
    fn d_below_two_rejected() {
        assert!(matches!(WeylSystem::new(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn bell_state_correlators() {
        let s = FiniteEprState::new(2, 0, 0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = crate::matrix::real_vector(&[h, 0.0, 0.0, h]);
        assert!((&s.psi - &bell).norm() < 1e-15);
        let zz = pauli::z().kron(&pauli::z());
        assert!((s.state.expect(&zz).re - 1.0).abs() < 1e-15);
        let xx = pauli::x().kron(&pauli::x());
        assert!((s.state.expect(&xx).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn offset_clock_correlator() {
        let s = FiniteEprState::new(3, 1, 0).unwrap();
        let sys = &s.system;
        let zz = &sys.first(sys.clock()) * &sys.second(&sys.clock_pow(-1));
        assert!((s.state.expect(&zz) - sys.omega(1)).norm() < 1e-14);
    }

    #[test]
    fn correlator_grid_for_all_offsets() {
        for d in [2, 3, 5] {
            for u in 0..d as i64 {
                for v in 0..d as i64 {
                    let s = FiniteEprState::new(d, u, v).unwrap();
                    assert!(s.correlator_residual() < 1e-12, "d={d} u={u} v={v}");
                }
            }
        }
    }

    #[test]
    fn contradiction_magnitudes() {
        let opts = VerifyOptions::default();
        let r2 = weyl_exclusion(&FiniteEprState::new(2, 0, 0).unwrap(), 1, 1, &opts, &tol()).unwrap();
        assert!((r2.contradiction_magnitude - 2.0).abs() < 1e-12);
        assert!((r2.numeric_magnitude - 2.0).abs() < 1e-12);
        // [Z, X] = 2ZX for d = 2, so the modulus is 4 in every state.
        assert!((r2.measured_modulus - 4.0).abs() < 1e-12);
        let r3 = weyl_exclusion(&FiniteEprState::new(3, 0, 0).unwrap(), 1, 1, &opts, &tol()).unwrap();
        assert!((r3.contradiction_magnitude - 3f64.sqrt()).abs() < 1e-12);
        assert!((r3.numeric_magnitude - 3f64.sqrt()).abs() < 1e-12);
        assert!(r3.epr.is_epr);
        assert!(r3.partner_commutation.unwrap().passed());
    }

    #[test]
    fn degenerate_exponents_rejected() {
        let s = FiniteEprState::new(4, 0, 0).unwrap();
        assert!(matches!(
            weyl_exclusion(&s, 2, 2, &VerifyOptions::default(), &tol()),
            Err(Error::DegenerateChoice(4, 4))
        ));
    }

    #[test]
    fn modulus_vanishes_exactly_on_degenerate_exponents() {
        for d in [2usize, 3, 4, 6] {
            let s = FiniteEprState::new(d, 1, 0).unwrap();
            for a in 0..d as i64 {
                for b in 0..d as i64 {
                    let m = s.commutator_modulus(a, b);
                    let degenerate = (a * b).rem_euclid(d as i64) == 0;
                    assert_eq!(m < 1e-20, degenerate, "d={d} a={a} b={b} m={m}");
                }
            }
        }
    }

    #[test]
    fn transport_of_functions_on_zd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s2 = FiniteEprState::new(2, 0, 0).unwrap();
        let indicator = vec![C64::new(1.0, 0.0), ZERO];
        let constant = vec![C64::new(0.7, 0.0); 2];
        let r = finite_ap_transport(&s2, &[indicator, constant]).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12));
        let s5 = FiniteEprState::new(5, 2, 3).unwrap();
        let f: Vec<C64> = (0..5).map(|_| random::complex_normal(&mut rng)).collect();
        assert!(finite_ap_transport(&s5, &[f]).unwrap()[0] < 1e-10);
    }
}
