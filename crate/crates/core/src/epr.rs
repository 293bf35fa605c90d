//! EPR states for commuting pairs, joint distributions, commutation in a
//! state and incommensurability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{real_vector, Operator, C64};
use crate::spectral::{spectral_decomposition, unitary_exp};
use crate::state::State;
use crate::tolerance::ToleranceConfig;

/// Two Hermitian observables that commute as operators.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    first: Operator,
    second: Operator,
}

impl CommutingPair {
    pub fn new(first: Operator, second: Operator, tol: &ToleranceConfig) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: second.dim(),
            });
        }
        for x in [&first, &second] {
            if !x.is_hermitian(tol.eps_zero) {
                return Err(Error::NotHermitian(x.hermitian_residual()));
            }
        }
        let c = first.commutator(&second).norm();
        if c >= tol.eps_zero * (first.norm() * second.norm()).max(1.0) {
            return Err(Error::NonCommutingPair(c));
        }
        Ok(CommutingPair { first, second })
    }

    pub fn first(&self) -> &Operator {
        &self.first
    }

    pub fn second(&self) -> &Operator {
        &self.second
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    /// `A − B`
    pub fn difference(&self) -> Operator {
        &self.first - &self.second
    }
}

/// `μ(aᵢ, bⱼ) = φ(Pᵢ Qⱼ)` over all pairs of spectral values.
#[derive(Debug, Clone, Serialize)]
pub struct JointDistribution {
    pub support: Vec<(f64, f64)>,
    pub probabilities: Vec<f64>,
    /// `|Σ aᵢ bⱼ μ(aᵢ, bⱼ) − φ(AB)|`
    pub moment_residual: f64,
    /// Largest negative value clipped before renormalization.
    pub clipped: f64,
}

fn same_value(a: f64, b: f64, tol: &ToleranceConfig) -> bool {
    (a - b).abs() <= tol.eps_rank * a.abs().max(b.abs()).max(1.0)
}

/// Sums probabilities sharing an (approximately) equal value.
fn accumulate(points: impl Iterator<Item = (f64, f64)>, tol: &ToleranceConfig) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (x, p) in points {
        match out.iter_mut().find(|(y, _)| same_value(x, *y, tol)) {
            Some(entry) => entry.1 += p,
            None => out.push((x, p)),
        }
    }
    out
}

impl JointDistribution {
    /// `Σ {μ(a, b) : a = b}`
    pub fn diagonal_mass(&self, tol: &ToleranceConfig) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|((a, b), _)| same_value(*a, *b, tol))
            .map(|(_, p)| p)
            .sum()
    }

    pub fn first_marginal(&self, tol: &ToleranceConfig) -> Vec<(f64, f64)> {
        accumulate(self.support.iter().map(|s| s.0).zip(self.probabilities.iter().cloned()), tol)
    }

    pub fn second_marginal(&self, tol: &ToleranceConfig) -> Vec<(f64, f64)> {
        accumulate(self.support.iter().map(|s| s.1).zip(self.probabilities.iter().cloned()), tol)
    }

    pub fn probability(&self, a: f64, b: f64, tol: &ToleranceConfig) -> f64 {
        self.support
            .iter()
            .zip(&self.probabilities)
            .filter(|((x, y), _)| same_value(*x, a, tol) && same_value(*y, b, tol))
            .map(|(_, p)| p)
            .sum()
    }
}

pub fn joint_distribution(pair: &CommutingPair, state: &State, tol: &ToleranceConfig) -> Result<JointDistribution> {
    let sa = spectral_decomposition(pair.first(), tol)?;
    let sb = spectral_decomposition(pair.second(), tol)?;
    let mut support = Vec::new();
    let mut probabilities = Vec::new();
    let mut clipped = 0.0f64;
    for pa in &sa.components {
        for qb in &sb.components {
            let p = state.expect(&(&pa.projection * &qb.projection)).re;
            if p < -tol.eps_zero {
                return Err(Error::NegativeProbability(p));
            }
            clipped = clipped.min(p);
            support.push((pa.eigenvalue, qb.eigenvalue));
            probabilities.push(p.max(0.0));
        }
    }
    let total: f64 = probabilities.iter().sum();
    if total > 0.0 {
        probabilities.iter_mut().for_each(|p| *p /= total);
    }
    let moment: f64 = support.iter().zip(&probabilities).map(|((a, b), p)| a * b * p).sum();
    let target = state.expect(&(pair.first() * pair.second()));
    Ok(JointDistribution {
        support,
        probabilities,
        moment_residual: (C64::new(moment, 0.0) - target).norm(),
        clipped: -clipped,
    })
}

/// Largest deviation of a marginal of `μ` from the spectral distribution of
/// the corresponding observable in `state`.
pub fn marginal_residual(dist: &JointDistribution, pair: &CommutingPair, state: &State, tol: &ToleranceConfig) -> Result<f64> {
    let mut worst = 0.0f64;
    for (marginal, obs) in [
        (dist.first_marginal(tol), pair.first()),
        (dist.second_marginal(tol), pair.second()),
    ] {
        for c in spectral_decomposition(obs, tol)?.components {
            let expected = state.expect(&c.projection).re;
            let found = marginal
                .iter()
                .filter(|(x, _)| same_value(*x, c.eigenvalue, tol))
                .map(|(_, p)| p)
                .sum::<f64>();
            worst = worst.max((expected - found).abs());
        }
    }
    Ok(worst)
}

/// Non-arithmetic grid of 32 positive times; no two ratios are small integers
/// so that `e^{itc} = 1` on the whole grid forces `c = 0` for moderate `c`.
pub fn default_time_grid() -> Vec<f64> {
    (1..=32).map(|k| 0.25 * k as f64 * (1.0 + k as f64 / 16.0)).collect()
}

/// Three characterizations of `φ((A − B)²) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct EprDiagnostics {
    /// `φ((A − B)²)`
    pub moment: f64,
    pub diagonal_mass: f64,
    /// `max_t |φ(e^{itA} e^{−itB}) − 1|`
    pub grid_residual: f64,
    pub grid_points: usize,
    pub is_epr: bool,
    pub diagonal_ok: bool,
    pub grid_ok: bool,
}

impl EprDiagnostics {
    /// The characterizations agree.
    pub fn consistent(&self) -> bool {
        self.is_epr == self.diagonal_ok && self.is_epr == self.grid_ok
    }
}

pub fn is_epr_state(state: &State, pair: &CommutingPair, grid: &[f64], tol: &ToleranceConfig) -> Result<EprDiagnostics> {
    let moment = state.modulus(&pair.difference());
    let dist = joint_distribution(pair, state, tol)?;
    let diagonal_mass = dist.diagonal_mass(tol);
    let grid_residual = grid
        .iter()
        .map(|&t| {
            let u = &unitary_exp(pair.first(), t) * &unitary_exp(pair.second(), -t);
            (state.expect(&u) - C64::new(1.0, 0.0)).norm()
        })
        .fold(0.0, f64::max);
    Ok(EprDiagnostics {
        moment,
        diagonal_mass,
        grid_residual,
        grid_points: grid.len(),
        is_epr: moment < tol.eps_zero,
        diagonal_ok: (diagonal_mass - 1.0).abs() < tol.eps_feas,
        grid_ok: grid_residual < tol.eps_feas,
    })
}

/// `X, X², …, X^k` up to `max_power`, stopping early once a power repeats an
/// earlier one (including `X⁰ = I`). The flag is true when the list provably
/// covers every positive power.
pub fn distinct_powers(x: &Operator, max_power: usize, tol: &ToleranceConfig) -> (Vec<Operator>, bool) {
    let mut seen = vec![Operator::identity(x.dim())];
    let mut current = Operator::identity(x.dim());
    for _ in 0..=max_power {
        let next = &current * x;
        let scale = next.fro_norm().max(1.0);
        if seen.iter().any(|p| (p - &next).fro_norm() <= tol.eps_zero * scale) {
            return (seen.split_off(1), true);
        }
        if seen.len() > max_power {
            break;
        }
        seen.push(next.clone());
        current = next;
    }
    (seen.split_off(1), false)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorModulus {
    pub n: usize,
    pub m: usize,
    pub value: f64,
}

/// Result of scanning `φ(|[Aⁿ, Bᵐ]|²)` over `1 ≤ n, m ≤ max_power`.
#[derive(Debug, Clone, Serialize)]
pub struct CommutationScan {
    pub commute: bool,
    pub max_modulus: f64,
    /// Exponents of the largest modulus.
    pub witness: (usize, usize),
    pub moduli: Vec<CommutatorModulus>,
    /// Every positive power of both operators was covered.
    pub exhaustive: bool,
}

pub fn commute_in_state(a: &Operator, b: &Operator, state: &State, max_power: usize, tol: &ToleranceConfig) -> CommutationScan {
    let (pa, ea) = distinct_powers(a, max_power, tol);
    let (pb, eb) = distinct_powers(b, max_power, tol);
    let mut moduli = Vec::new();
    let mut best = (0.0f64, (1, 1));
    for (i, x) in pa.iter().enumerate() {
        for (j, y) in pb.iter().enumerate() {
            let value = state.modulus(&x.commutator(y));
            if value > best.0 {
                best = (value, (i + 1, j + 1));
            }
            moduli.push(CommutatorModulus {
                n: i + 1,
                m: j + 1,
                value,
            });
        }
    }
    CommutationScan {
        commute: best.0 < tol.eps_zero,
        max_modulus: best.0,
        witness: best.1,
        moduli,
        exhaustive: ea && eb,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Incommensurability {
    pub incommensurable: bool,
    /// Side `j` scans `φ(|[A_jⁿ, B_jᵐ]|²)`.
    pub sides: [CommutationScan; 2],
}

impl Incommensurability {
    pub fn moduli(&self) -> [f64; 2] {
        [self.sides[0].max_modulus, self.sides[1].max_modulus]
    }
}

/// `pair1 = (A₁, A₂)` and `pair2 = (B₁, B₂)`, with `A_j, B_j` on side `j`.
/// The two sides must commute with each other as operators.
pub fn incommensurability_check(
    state: &State,
    pair1: &CommutingPair,
    pair2: &CommutingPair,
    max_power: usize,
    tol: &ToleranceConfig,
) -> Result<Incommensurability> {
    let cross = pair1
        .first()
        .commutator(pair2.second())
        .norm()
        .max(pair2.first().commutator(pair1.second()).norm())
        .max(pair2.first().commutator(pair2.second()).norm());
    let scale = [pair1.first(), pair1.second(), pair2.first(), pair2.second()]
        .iter()
        .map(|x| x.norm())
        .fold(1.0, f64::max);
    if cross >= tol.eps_zero * scale * scale {
        return Err(Error::NonCommutingFactors(cross));
    }
    let side1 = commute_in_state(pair1.first(), pair2.first(), state, max_power, tol);
    let side2 = commute_in_state(pair1.second(), pair2.second(), state, max_power, tol);
    Ok(Incommensurability {
        incommensurable: !side1.commute && !side2.commute,
        sides: [side1, side2],
    })
}

/// `f(x) = Σ αₖ e^{i tₖ x}`
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    pub terms: Vec<(C64, f64)>,
}

impl TrigPolynomial {
    pub fn constant(c: f64) -> Self {
        TrigPolynomial {
            terms: vec![(C64::new(c, 0.0), 0.0)],
        }
    }

    pub fn exp(t: f64) -> Self {
        TrigPolynomial {
            terms: vec![(C64::new(1.0, 0.0), t)],
        }
    }

    pub fn cos() -> Self {
        TrigPolynomial {
            terms: vec![(C64::new(0.5, 0.0), 1.0), (C64::new(0.5, 0.0), -1.0)],
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|(a, t)| a * C64::from_polar(1.0, t * x)).sum()
    }

    /// `f(H)` by spectral calculus.
    pub fn apply(&self, h: &Operator, tol: &ToleranceConfig) -> Result<Operator> {
        Ok(spectral_decomposition(h, tol)?.apply(|x| self.eval(x)))
    }
}

/// `φ(|f(A) − f(B)|²)` for each `f`.
pub fn epr_function_transport(
    state: &State,
    pair: &CommutingPair,
    functions: &[TrigPolynomial],
    tol: &ToleranceConfig,
) -> Result<Vec<f64>> {
    functions
        .iter()
        .map(|f| {
            let d = &f.apply(pair.first(), tol)? - &f.apply(pair.second(), tol)?;
            Ok(state.modulus(&d))
        })
        .collect()
}

/// Spin singlet with the two pairs of spin projections along orthogonal axes.
#[derive(Debug, Clone)]
pub struct SingletScenario {
    pub state: State,
    /// `(A₁, A₂)`: projections along the first axis on each side.
    pub pair1: CommutingPair,
    /// `(B₁, B₂)`: projections along the second axis.
    pub pair2: CommutingPair,
}

pub fn bohm_singlet() -> SingletScenario {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = State::from_unnormalized(real_vector(&[0.0, h, -h, 0.0])).expect("nonzero vector");
    let id = Operator::identity(2);
    let up = Operator::real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let down = Operator::real(&[&[0.0, 0.0], &[0.0, 1.0]]);
    let plus = Operator::real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let minus = Operator::real(&[&[0.5, -0.5], &[-0.5, 0.5]]);
    SingletScenario {
        state,
        pair1: CommutingPair {
            first: up.kron(&id),
            second: id.kron(&down),
        },
        pair2: CommutingPair {
            first: plus.kron(&id),
            second: id.kron(&minus),
        },
    }
}
