//! Beable subalgebras of a measurement context and the results built on them:
//! commutation with an EPR partner, exclusion of incommensurable observables,
//! and a greedy appropriate-mixture construction.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::{commutant, generate_algebra, StarAlgebra};
use crate::classical::{classicality_check, ClassicalityCertificate};
use crate::epr::{commute_in_state, default_time_grid, distinct_powers, incommensurability_check, is_epr_state};
use crate::epr::{CommutingPair, EprDiagnostics, Incommensurability};
use crate::error::{Error, Result};
use crate::matrix::Operator;
use crate::spectral::{spectral_decomposition, unitary_exp};
use crate::state::State;
use crate::tolerance::ToleranceConfig;

/// Scope label carried by every sampled definability result.
pub const DEF_SCOPE: &str = "necessary-condition test";

/// A state together with the observable being measured in it.
#[derive(Debug, Clone)]
pub struct MeasurementContext {
    pub state: State,
    pub measured: Operator,
}

impl MeasurementContext {
    pub fn new(state: State, measured: Operator, tol: &ToleranceConfig) -> Result<Self> {
        if measured.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: measured.dim(),
            });
        }
        if !measured.is_hermitian(tol.eps_zero) {
            return Err(Error::NotHermitian(measured.hermitian_residual()));
        }
        Ok(MeasurementContext { state, measured })
    }
}

/// Knobs shared by the verifiers.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub max_power: usize,
    pub time_grid: Vec<f64>,
    pub symmetry_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_power: 4,
            time_grid: default_time_grid(),
            symmetry_samples: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Exclusion {
    pub observable: String,
    pub condition: String,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BeableReport {
    pub beable_ok: bool,
    pub a_priv_ok: bool,
    /// Sampled definability; see `def_scope`.
    pub def_ok: bool,
    pub def_scope: &'static str,
    pub def_samples: usize,
    /// The sampled symmetry family was empty, so the test is vacuous.
    pub def_vacuous: bool,
    pub max_def_violation: f64,
    pub classicality_residual: f64,
    pub membership_residual: f64,
    pub exclusions: Vec<Exclusion>,
}

impl BeableReport {
    /// Classicality and membership of the measured observable.
    pub fn premises_ok(&self) -> bool {
        self.beable_ok && self.a_priv_ok
    }
}

/// Real nullspace of `m` with singular values at most `eps · max(1, σ_max)`.
fn real_nullspace(m: &DMatrix<f64>, eps: f64) -> Vec<DVector<f64>> {
    crate::svd::svd_real(m).nullspace(eps)
}

/// Hermitian `K` in the commutant of `C*(A)` with `KΨ = 0`, as an orthonormal
/// coordinate basis over the Hermitian basis of the commutant.
fn symmetry_generators(ctx: &MeasurementContext, tol: &ToleranceConfig) -> Result<Vec<Operator>> {
    let psi = ctx
        .state
        .inducing_vector()
        .ok_or_else(|| Error::PremiseFailure("symmetry sampling needs a vector state".into()))?;
    let n = ctx.state.dim();
    let ca = generate_algebra(std::slice::from_ref(&ctx.measured), n, tol)?;
    let comm = commutant(&ca, tol);
    let images: Vec<_> = comm.basis().iter().map(|h| h.apply(psi)).collect();
    let m = DMatrix::from_fn(2 * n, images.len(), |r, c| {
        let z = images[c][r / 2];
        if r % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    Ok(real_nullspace(&m, tol.eps_rank)
        .into_iter()
        .map(|coeffs| {
            comm.basis()
                .iter()
                .zip(coeffs.iter())
                .fold(Operator::zeros(n), |acc, (h, &c)| acc + h.scale_real(c))
        })
        .collect())
}

/// `n` unitaries `exp(iK)` fixing the inducing vector and commuting with the
/// measured observable, drawn deterministically from `seed`.
pub fn sample_context_symmetries(ctx: &MeasurementContext, n: usize, seed: u64, tol: &ToleranceConfig) -> Result<Vec<Operator>> {
    let gens = symmetry_generators(ctx, tol)?;
    if gens.is_empty() {
        return Err(Error::EmptySymmetryFamily);
    }
    let dim = ctx.state.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let k = gens.iter().fold(Operator::zeros(dim), |acc, g| {
                let c: f64 = StandardNormal.sample(&mut rng);
                acc + g.scale_real(c)
            });
            unitary_exp(&k, 1.0)
        })
        .collect())
}

/// `max(‖A − P(A)‖, ‖Pᵢ − P(Pᵢ)‖)` over the spectral projections `Pᵢ` of `A`.
fn measured_membership(b: &StarAlgebra, a: &Operator, tol: &ToleranceConfig) -> f64 {
    let mut worst = b.membership_residual(a);
    if let Ok(s) = spectral_decomposition(a, tol) {
        for c in s.components {
            worst = worst.max(b.membership_residual(&c.projection));
        }
    }
    worst
}

fn definability(b: &StarAlgebra, ctx: &MeasurementContext, options: &VerifyOptions, tol: &ToleranceConfig) -> (bool, usize, f64) {
    match sample_context_symmetries(ctx, options.symmetry_samples, options.seed, tol) {
        Ok(us) => {
            let worst = us
                .iter()
                .map(|u| b.conjugate(u).subspace_distance(b))
                .fold(0.0, f64::max);
            (false, us.len(), worst)
        }
        Err(_) => (true, 0, 0.0),
    }
}

pub fn check_beable_subalgebra(b: &StarAlgebra, ctx: &MeasurementContext, options: &VerifyOptions, tol: &ToleranceConfig) -> BeableReport {
    let cert = classicality_check(&ctx.state, b, tol);
    beable_report(b, ctx, &cert, options, tol)
}

fn beable_report(
    b: &StarAlgebra,
    ctx: &MeasurementContext,
    cert: &ClassicalityCertificate,
    options: &VerifyOptions,
    tol: &ToleranceConfig,
) -> BeableReport {
    let membership = measured_membership(b, &ctx.measured, tol);
    let (vacuous, samples, max_def) = definability(b, ctx, options, tol);
    let a_priv_ok = membership < tol.eps_rank;
    let def_ok = vacuous || max_def < tol.eps_rank;
    let mut exclusions = Vec::new();
    if !cert.classical {
        exclusions.push(Exclusion {
            observable: "algebra".into(),
            condition: "Beable".into(),
            violation: cert.residual,
        });
    }
    if !a_priv_ok {
        exclusions.push(Exclusion {
            observable: "measured".into(),
            condition: "A-Priv".into(),
            violation: membership,
        });
    }
    if !def_ok {
        exclusions.push(Exclusion {
            observable: "algebra".into(),
            condition: "Def".into(),
            violation: max_def,
        });
    }
    BeableReport {
        beable_ok: cert.classical,
        a_priv_ok,
        def_ok,
        def_scope: DEF_SCOPE,
        def_samples: samples,
        def_vacuous: vacuous,
        max_def_violation: max_def,
        classicality_residual: cert.residual,
        membership_residual: membership,
        exclusions,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartnerCommutation {
    pub premise: BeableReport,
    pub epr: EprDiagnostics,
    /// `max φ(|[Bⁿ, Z]|²)` over basis `Z` and `n ≤ max_power`.
    pub max_modulus: f64,
    pub powers_exhaustive: bool,
    /// `max_t ‖(V_t − I)Ω‖` with `V_t = exp(−it(A − B))`.
    pub fixed_vector_deviation: f64,
    /// `max_t` subspace distance between `V_t* B V_t` and `B`.
    pub flow_invariance: f64,
    /// Largest residual of `[A − B, Z]` against the span of `B`.
    pub derivative_membership: f64,
    pub conclusion_ok: bool,
    pub fixed_vector_ok: bool,
    pub flow_ok: bool,
    pub derivative_ok: bool,
}

impl PartnerCommutation {
    pub fn passed(&self) -> bool {
        self.conclusion_ok && self.fixed_vector_ok && self.flow_ok && self.derivative_ok
    }
}

/// Checks that an EPR partner `B` of the measured observable commutes in the
/// state with every element of a beable algebra, together with the
/// ingredients of the argument: the flow `V_t` fixes the GNS vector, leaves
/// `B` invariant, and its generator maps `B` into itself.
///
/// Premises are classicality of the state on `b` and membership of the
/// measured observable. Sampled definability is reported but not required;
/// the part of it the argument needs, invariance under `V_t`, is checked.
pub fn verify_partner_commutation(
    ctx: &MeasurementContext,
    partner: &Operator,
    b: &StarAlgebra,
    options: &VerifyOptions,
    tol: &ToleranceConfig,
) -> Result<PartnerCommutation> {
    let pair = CommutingPair::new(ctx.measured.clone(), partner.clone(), tol)
        .map_err(|e| Error::PremiseFailure(format!("measured observable and partner: {e}")))?;
    let epr = is_epr_state(&ctx.state, &pair, &options.time_grid, tol)?;
    if !epr.is_epr {
        return Err(Error::PremiseFailure(format!(
            "state is not EPR for the pair: phi((A-B)^2) = {:.3e}",
            epr.moment
        )));
    }
    let premise = check_beable_subalgebra(b, ctx, options, tol);
    if !premise.beable_ok {
        return Err(Error::PremiseFailure(format!(
            "beable_ok false: classicality feasibility fails with residual {:.3e}",
            premise.classicality_residual
        )));
    }
    if !premise.a_priv_ok {
        return Err(Error::PremiseFailure(format!(
            "a_priv_ok false: measured observable outside the algebra, residual {:.3e}",
            premise.membership_residual
        )));
    }

    let (powers, powers_exhaustive) = distinct_powers(partner, options.max_power, tol);
    let mut max_modulus = 0.0f64;
    for p in &powers {
        for z in b.basis() {
            max_modulus = max_modulus.max(ctx.state.modulus(&p.commutator(z)));
        }
    }

    let diff = pair.difference();
    let n = ctx.state.dim();
    let mut fixed = 0.0f64;
    let mut flow = 0.0f64;
    for &t in &options.time_grid {
        let v = unitary_exp(&diff, -t);
        fixed = fixed.max(ctx.state.gns_norm(&(&v - &Operator::identity(n))));
        flow = flow.max(b.conjugate(&v).subspace_distance(b));
    }
    let derivative = b
        .basis()
        .iter()
        .map(|z| b.membership_residual(&diff.commutator(z)))
        .fold(0.0, f64::max);

    Ok(PartnerCommutation {
        premise,
        epr,
        max_modulus,
        powers_exhaustive,
        fixed_vector_deviation: fixed,
        flow_invariance: flow,
        derivative_membership: derivative,
        conclusion_ok: max_modulus < tol.eps_feas,
        fixed_vector_ok: fixed < tol.eps_zero,
        flow_ok: flow < tol.eps_rank,
        derivative_ok: derivative < tol.eps_rank,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExclusionReport {
    /// `max φ(|[A₁ⁿ, Cᵐ]|²)`: nonzero rules out any beable algebra for the
    /// measured observable that contains `C`.
    pub measured_modulus: f64,
    /// `max φ(|[A₂ⁿ, Cᵐ]|²)`: nonzero contradicts commutation with the EPR partner.
    pub partner_modulus: f64,
    pub violation: f64,
    pub excluded: bool,
    /// Which consequence is violated, if any.
    pub condition: Option<&'static str>,
    pub exhaustive: bool,
    pub incommensurability: Incommensurability,
}

/// Tests a candidate observable against both consequences of membership in a
/// beable algebra for `(φ, A₁)`, where `pair1 = (A₁, A₂)`.
pub fn verify_exclusion(
    ctx: &MeasurementContext,
    pair1: &CommutingPair,
    pair2: &CommutingPair,
    candidate: &Operator,
    options: &VerifyOptions,
    tol: &ToleranceConfig,
) -> Result<ExclusionReport> {
    if (pair1.first() - &ctx.measured).fro_norm() > tol.eps_zero * ctx.measured.fro_norm().max(1.0) {
        return Err(Error::PremiseFailure("measured observable is not the first member of pair1".into()));
    }
    for (label, pair) in [("pair1", pair1), ("pair2", pair2)] {
        let d = is_epr_state(&ctx.state, pair, &options.time_grid, tol)?;
        if !d.is_epr {
            return Err(Error::PremiseFailure(format!("state is not EPR for {label}: moment {:.3e}", d.moment)));
        }
    }
    let inc = incommensurability_check(&ctx.state, pair1, pair2, options.max_power, tol)?;
    if !inc.incommensurable {
        return Err(Error::PremiseFailure("pairs are not incommensurable".into()));
    }
    let measured = commute_in_state(pair1.first(), candidate, &ctx.state, options.max_power, tol);
    let partner = commute_in_state(pair1.second(), candidate, &ctx.state, options.max_power, tol);
    let violation = measured.max_modulus.max(partner.max_modulus);
    let excluded = violation > tol.eps_zero;
    let condition = excluded.then(|| {
        if measured.max_modulus >= partner.max_modulus {
            "commutation in the state with the measured observable"
        } else {
            "commutation in the state with the EPR partner"
        }
    });
    Ok(ExclusionReport {
        measured_modulus: measured.max_modulus,
        partner_modulus: partner.max_modulus,
        violation,
        excluded,
        condition,
        exhaustive: measured.exhaustive && partner.exhaustive,
        incommensurability: inc,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Admission {
    pub index: usize,
    pub admitted: bool,
    pub epr_partner: bool,
    pub commutes_in_state: bool,
    pub classical: bool,
    pub classicality_residual: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct AppropriateMixture {
    pub algebra: StarAlgebra,
    pub log: Vec<Admission>,
}

/// Starts from `C*(A)` and adjoins pool elements that are EPR partners of `A`
/// or commute in the state with everything admitted so far, as long as the
/// state stays classical on the enlarged algebra.
pub fn build_appropriate_mixture(
    ctx: &MeasurementContext,
    pool: &[Operator],
    options: &VerifyOptions,
    tol: &ToleranceConfig,
) -> Result<AppropriateMixture> {
    let n = ctx.state.dim();
    let mut admitted = vec![ctx.measured.clone()];
    let mut algebra = generate_algebra(&admitted, n, tol)?;
    let mut log = Vec::new();
    for (index, p) in pool.iter().enumerate() {
        let epr_partner = CommutingPair::new(ctx.measured.clone(), p.clone(), tol)
            .and_then(|pair| is_epr_state(&ctx.state, &pair, &options.time_grid, tol))
            .map(|d| d.is_epr)
            .unwrap_or(false);
        let commutes = admitted
            .iter()
            .all(|x| commute_in_state(x, p, &ctx.state, options.max_power, tol).commute);
        let mut candidate = admitted.clone();
        candidate.push(p.clone());
        let enlarged = generate_algebra(&candidate, n, tol)?;
        let cert = classicality_check(&ctx.state, &enlarged, tol);
        let ok = (epr_partner || commutes) && cert.classical;
        let reason = if ok {
            if epr_partner {
                "EPR partner of the measured observable; state stays classical".to_string()
            } else {
                "commutes in the state with every admitted element; state stays classical".to_string()
            }
        } else {
            let mut why = Vec::new();
            if !epr_partner && !commutes {
                why.push("not an EPR partner and fails to commute in the state with an admitted element");
            }
            if !cert.classical {
                why.push("classicality fails on the enlarged algebra");
            }
            why.join("; ")
        };
        log.push(Admission {
            index,
            admitted: ok,
            epr_partner,
            commutes_in_state: commutes,
            classical: cert.classical,
            classicality_residual: cert.residual,
            reason,
        });
        if ok {
            admitted = candidate;
            algebra = enlarged;
        }
    }
    Ok(AppropriateMixture { algebra, log })
}
