//! Scenario execution: each scenario becomes a list of named checks.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::anchors;
use super::config::{CustomState, ResolvedScenario, RunSettings, ScenarioConfig, ScenarioKind, ScenarioSpec};
use crate::algebra::generate_algebra;
use crate::beable::{
    build_appropriate_mixture, check_beable_subalgebra, verify_exclusion, verify_partner_commutation, MeasurementContext,
    VerifyOptions,
};
use crate::epr::{
    default_time_grid, epr_function_transport, incommensurability_check, is_epr_state, joint_distribution,
    marginal_residual, bohm_singlet, CommutingPair, TrigPolynomial,
};
use crate::error::{Error, Result};
use crate::gns::gns_construct;
use crate::matrix::{vector_to_value, Operator, C64, ZERO};
use crate::random::complex_normal;
use crate::state::State;
use crate::tolerance::ToleranceConfig;
use crate::weyl::{finite_ap_transport, weyl_exclusion, FiniteEprState, WeylSystem};
use crate::witness::{local_generators, EprWitness, EXPECTATION_LABELS};

pub const SCHEMA: &str = "beable-lab/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub measured: BTreeMap<String, Value>,
    /// Tolerances the check compared against.
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub scenario: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub status: Status,
    pub tolerances: ToleranceConfig,
    pub checks: Vec<Check>,
    pub witnesses: BTreeMap<String, Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail).collect()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Rounds to 15 significant digits; `-0` becomes `0`.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Applies `round_significant` to every float in a JSON tree.
pub fn normalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn to_value(x: impl Serialize) -> Value {
    normalize(serde_json::to_value(x).unwrap_or(Value::Null))
}

/// Values a check records while it runs.
struct Measure {
    tol: ToleranceConfig,
    measured: BTreeMap<String, Value>,
    tolerances: BTreeMap<String, f64>,
    detail: Option<String>,
}

impl Measure {
    fn num(&mut self, key: &str, x: f64) {
        self.measured.insert(key.to_string(), to_value(x));
    }

    fn put(&mut self, key: &str, x: impl Serialize) {
        self.measured.insert(key.to_string(), to_value(x));
    }

    fn zero(&mut self) -> f64 {
        self.tolerances.insert("eps_zero".into(), self.tol.eps_zero);
        self.tol.eps_zero
    }

    fn rank(&mut self) -> f64 {
        self.tolerances.insert("eps_rank".into(), self.tol.eps_rank);
        self.tol.eps_rank
    }

    fn feas(&mut self) -> f64 {
        self.tolerances.insert("eps_feas".into(), self.tol.eps_feas);
        self.tol.eps_feas
    }

    fn note(&mut self, text: impl Into<String>) {
        self.detail = Some(text.into());
    }
}

struct Runner {
    tol: ToleranceConfig,
    timing: bool,
    checks: Vec<Check>,
    witnesses: BTreeMap<String, Value>,
}

impl Runner {
    fn check(&mut self, id: &str, anchor: &str, f: impl FnOnce(&mut Measure) -> Result<bool>) -> bool {
        debug_assert!(anchors::is_known(anchor), "unknown anchor {anchor}");
        let mut m = Measure {
            tol: self.tol,
            measured: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            detail: None,
        };
        let start = Instant::now();
        let outcome = f(&mut m);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let status = match outcome {
            Ok(true) => Status::Pass,
            Ok(false) => Status::Fail,
            Err(e) => {
                m.detail = Some(match m.detail.take() {
                    Some(d) => format!("{d}; error: {e}"),
                    None => format!("error: {e}"),
                });
                Status::Fail
            }
        };
        self.checks.push(Check {
            id: id.to_string(),
            anchor: anchor.to_string(),
            status,
            measured: m.measured,
            tolerances: m.tolerances,
            detail: m.detail,
            timing_ms: self.timing.then(|| (elapsed * 1e3).round() / 1e3),
        });
        status == Status::Pass
    }

    fn skip(&mut self, id: &str, anchor: &str, reason: &str) {
        self.checks.push(Check {
            id: id.to_string(),
            anchor: anchor.to_string(),
            status: Status::Skipped,
            measured: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            detail: Some(reason.to_string()),
            timing_ms: None,
        });
    }

    fn witness(&mut self, key: &str, value: impl Serialize) {
        self.witnesses.insert(key.to_string(), to_value(value));
    }
}

/// Inputs shared by the singlet, witness and custom scenarios.
struct PairSuite<'a> {
    state: &'a State,
    pair1: &'a CommutingPair,
    pair2: Option<&'a CommutingPair>,
    /// `None` uses the measured observable's partner and the second-pair partner.
    pool: Option<&'a [Operator]>,
}

fn options(r: &ResolvedScenario) -> VerifyOptions {
    VerifyOptions {
        max_power: r.max_power,
        time_grid: default_time_grid(),
        symmetry_samples: r.symmetry_samples,
        seed: r.seed,
    }
}

fn epr_check(run: &mut Runner, id: &str, state: &State, pair: &CommutingPair, opts: &VerifyOptions) {
    run.check(id, "epr-state", |m| {
        let d = is_epr_state(state, pair, &opts.time_grid, &m.tol)?;
        m.num("moment", d.moment);
        m.num("diagonal_mass", d.diagonal_mass);
        m.num("grid_residual", d.grid_residual);
        m.put("grid_points", d.grid_points);
        m.put("characterizations_agree", d.consistent());
        m.zero();
        m.feas();
        Ok(d.is_epr && d.diagonal_ok && d.grid_ok)
    });
}

fn random_trig(rng: &mut ChaCha8Rng) -> TrigPolynomial {
    TrigPolynomial {
        terms: (0..3).map(|_| (complex_normal(rng), rng.random_range(-3.0..3.0))).collect(),
    }
}

fn run_pair_suite(run: &mut Runner, suite: PairSuite<'_>, opts: &VerifyOptions, seed: u64) {
    let PairSuite {
        state,
        pair1,
        pair2,
        pool,
    } = suite;
    let n = state.dim();
    epr_check(run, "pair1-epr", state, pair1, opts);
    if let Some(p2) = pair2 {
        epr_check(run, "pair2-epr", state, p2, opts);
    }

    run.check("pair1-joint-distribution", "joint-distribution-diagonal", |m| {
        let dist = joint_distribution(pair1, state, &m.tol)?;
        let mass = dist.diagonal_mass(&m.tol);
        let marginal = marginal_residual(&dist, pair1, state, &m.tol)?;
        m.put("support", &dist.support);
        m.put("probabilities", &dist.probabilities);
        m.num("diagonal_mass", mass);
        m.num("moment_residual", dist.moment_residual);
        m.num("marginal_residual", marginal);
        m.num("clipped", dist.clipped);
        m.zero();
        let feas = m.feas();
        m.rank();
        Ok((mass - 1.0).abs() < feas && dist.moment_residual < feas && marginal < feas)
    });

    let mut side_moduli = None;
    if let Some(p2) = pair2 {
        run.check("incommensurability", "incommensurable-pairs", |m| {
            let inc = incommensurability_check(state, pair1, p2, opts.max_power, &m.tol)?;
            for (k, side) in inc.sides.iter().enumerate() {
                m.put(&format!("side{}_witness", k + 1), side.witness);
                m.num(&format!("side{}_modulus", k + 1), side.max_modulus);
                m.put(&format!("side{}_exhaustive", k + 1), side.exhaustive);
            }
            m.put("max_power", opts.max_power);
            m.zero();
            side_moduli = Some(inc.moduli());
            Ok(inc.incommensurable)
        });
    }

    let ctx = match MeasurementContext::new(state.clone(), pair1.first().clone(), &run.tol) {
        Ok(c) => c,
        Err(e) => {
            run.check("beable-conditions", "beable-conditions", |_| Err(e));
            return;
        }
    };
    let algebra = generate_algebra(&[pair1.first().clone(), pair1.second().clone()], n, &run.tol);
    let algebra = match algebra {
        Ok(a) => a,
        Err(e) => {
            run.check("beable-conditions", "beable-conditions", |_| Err(e));
            return;
        }
    };

    let mut beable = None;
    run.check("beable-conditions", "beable-conditions", |m| {
        let r = check_beable_subalgebra(&algebra, &ctx, opts, &m.tol);
        m.put("algebra_dim", algebra.dim());
        m.put("beable_ok", r.beable_ok);
        m.put("a_priv_ok", r.a_priv_ok);
        m.num("classicality_residual", r.classicality_residual);
        m.num("membership_residual", r.membership_residual);
        m.put("def_ok", r.def_ok);
        m.put("def_samples", r.def_samples);
        m.put("def_vacuous", r.def_vacuous);
        m.num("max_def_violation", r.max_def_violation);
        m.put("def_scope", r.def_scope);
        m.feas();
        m.rank();
        m.note("sampled definability is reported as a necessary-condition diagnostic and does not set the status");
        let ok = r.premises_ok();
        beable = Some(r);
        Ok(ok)
    });
    if let Some(r) = beable {
        run.witness("beable_report", &r);
    }

    run.check("partner-commutation", "partner-commutation", |m| {
        let r = verify_partner_commutation(&ctx, pair1.second(), &algebra, opts, &m.tol)?;
        m.num("max_modulus", r.max_modulus);
        m.put("powers_exhaustive", r.powers_exhaustive);
        m.num("fixed_vector_deviation", r.fixed_vector_deviation);
        m.num("flow_invariance", r.flow_invariance);
        m.num("derivative_membership", r.derivative_membership);
        m.put("grid_points", opts.time_grid.len());
        m.put("max_power", opts.max_power);
        m.zero();
        m.rank();
        m.feas();
        Ok(r.passed())
    });

    if let Some(p2) = pair2 {
        for (id, candidate, side) in [
            ("exclusion-first-candidate", p2.first(), 0usize),
            ("exclusion-second-candidate", p2.second(), 1),
        ] {
            run.check(id, "exclusion", |m| {
                let r = verify_exclusion(&ctx, pair1, p2, candidate, opts, &m.tol)?;
                m.num("measured_modulus", r.measured_modulus);
                m.num("partner_modulus", r.partner_modulus);
                m.num("violation", r.violation);
                m.put("excluded", r.excluded);
                m.put("condition", r.condition);
                m.put("exhaustive", r.exhaustive);
                m.zero();
                let bound = side_moduli.map(|s| s[side]).unwrap_or(0.0);
                m.num("incommensurability_modulus", bound);
                Ok(r.excluded && r.violation >= bound)
            });
        }
        run.check("exclusion-partner", "exclusion", |m| {
            let r = verify_exclusion(&ctx, pair1, p2, pair1.second(), opts, &m.tol)?;
            m.num("measured_modulus", r.measured_modulus);
            m.num("partner_modulus", r.partner_modulus);
            m.num("violation", r.violation);
            m.put("excluded", r.excluded);
            m.zero();
            Ok(!r.excluded)
        });
    }

    let default_pool: Vec<Operator> = std::iter::once(pair1.second().clone())
        .chain(pair2.map(|p| p.second().clone()))
        .collect();
    let (pool_ops, expect_default) = match pool {
        Some(p) => (p.to_vec(), false),
        None => (default_pool, true),
    };
    let mut mixture_log = None;
    run.check("appropriate-mixture", "appropriate-mixture", |m| {
        let mix = build_appropriate_mixture(&ctx, &pool_ops, opts, &m.tol)?;
        let r = check_beable_subalgebra(&mix.algebra, &ctx, opts, &m.tol);
        m.put("algebra_dim", mix.algebra.dim());
        m.put("admitted", mix.log.iter().map(|a| a.admitted).collect::<Vec<_>>());
        m.put("result_beable_ok", r.beable_ok);
        m.put("result_a_priv_ok", r.a_priv_ok);
        m.feas();
        m.rank();
        m.zero();
        let mut ok = r.premises_ok();
        if expect_default {
            m.note("pool: EPR partner of the measured observable, then the second-pair partner");
            ok &= mix.log.first().is_some_and(|a| a.admitted);
            if pair2.is_some() {
                ok &= mix.log.get(1).is_some_and(|a| !a.admitted);
            }
        }
        mixture_log = Some(mix.log);
        Ok(ok)
    });
    if let Some(log) = mixture_log {
        run.witness("appropriate_mixture", &log);
    }

    run.check("function-transport", "function-transport", |m| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fs = vec![TrigPolynomial::exp(1.0), TrigPolynomial::constant(1.0), TrigPolynomial::cos()];
        fs.extend((0..3).map(|_| random_trig(&mut rng)));
        let residuals = epr_function_transport(state, pair1, &fs, &m.tol)?;
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        m.put("residuals", &residuals);
        m.num("max_residual", worst);
        m.feas();
        Ok(worst < m.tol.eps_feas)
    });

    run.check("gns-transport", "gns-representation", |m| {
        let g = gns_construct(&algebra, state, &m.tol);
        let contract = g.contract_residual(&algebra, state);
        let hom = g.homomorphism_residual(&algebra);
        let unit = g.unit_residual(n);
        let shifted = g.act_on_cyclic(&pair1.difference()).norm();
        m.put("gns_dim", g.dim());
        m.num("contract_residual", contract);
        m.num("homomorphism_residual", hom);
        m.num("unit_residual", unit);
        m.num("difference_on_cyclic", shifted);
        let zero = m.zero();
        m.rank();
        Ok(contract < zero && hom < zero && unit < zero && shifted * shifted < zero)
    });
}

fn run_singlet(run: &mut Runner, r: &ResolvedScenario) {
    let s = bohm_singlet();
    let opts = options(r);
    run.witness(
        "singlet",
        json!({
            "psi": vector_to_value(s.state.inducing_vector().expect("vector state")),
            "A1": s.pair1.first(), "A2": s.pair1.second(),
            "B1": s.pair2.first(), "B2": s.pair2.second(),
        }),
    );
    run_pair_suite(
        run,
        PairSuite {
            state: &s.state,
            pair1: &s.pair1,
            pair2: Some(&s.pair2),
            pool: None,
        },
        &opts,
        r.seed,
    );
}

fn factor_checks(m: &mut Measure, label: &str, f: &crate::witness::FactorData) -> bool {
    let v = &f.isometry;
    let vd = v.adjoint();
    let square = (v * v).norm();
    let orth = (&(v * &vd) * &(&vd * v)).norm();
    let piso = (&(&(v * &vd) * v) - v).norm();
    let rs = f.r.commutator(&f.s).norm();
    m.num(&format!("{label}_rs_commutator"), rs);
    m.num(&format!("{label}_isometry_square"), square);
    m.num(&format!("{label}_range_overlap"), orth);
    m.num(&format!("{label}_partial_isometry_residual"), piso);
    let zero = m.zero();
    rs > zero && square < zero && orth < zero && piso < zero
}

fn run_theorem1(run: &mut Runner, r: &ResolvedScenario, sites: &[usize], region1: &[usize], region2: &[usize]) {
    let opts = options(r);
    let ambient: usize = sites.iter().product();
    let mut built: Option<EprWitness> = None;
    run.check("witness-construction", "epr-witness-construction", |m| {
        m.put("sites", sites);
        m.put("region1", region1);
        m.put("region2", region2);
        m.put("ambient_dim", ambient);
        let n1 = generate_algebra(&local_generators(sites, region1), ambient, &m.tol)?;
        let n2 = generate_algebra(&local_generators(sites, region2), ambient, &m.tol)?;
        m.put("factor_dims", [n1.dim(), n2.dim()]);
        m.num("factor_cross_commutator", n1.max_cross_commutator(&n2));
        let w = EprWitness::build(&n1, &n2, &m.tol)?;
        let first = factor_checks(m, "first", &w.first);
        let second = factor_checks(m, "second", &w.second);
        let product = (&w.first.e * &w.second.e).norm();
        m.num("range_product_norm", product);
        let ok = first && second && product > m.tol.eps_zero;
        built = Some(w);
        Ok(ok)
    });
    let Some(w) = built else {
        for id in ["witness-expectations", "witness-moments", "witness-commutator-moduli"] {
            run.skip(id, "epr-witness-construction", "witness construction failed");
        }
        return;
    };
    let meas = w.measurements();
    run.witness(
        "epr_witness",
        json!({
            "V": w.first.isometry, "W": w.second.isometry,
            "E1": w.first.e, "F1": w.first.f, "E2": w.second.e, "F2": w.second.f,
            "psi": vector_to_value(&w.psi),
            "commutator_moduli": w.commutator_moduli,
            "measurements": meas,
        }),
    );

    run.check("witness-expectations", "epr-witness-construction", |m| {
        let zero = m.zero();
        let mut ok = true;
        for (label, x) in EXPECTATION_LABELS.iter().zip(meas.expectations) {
            m.num(&format!("phi_{label}"), x);
            ok &= (x - 0.5).abs() < zero;
        }
        Ok(ok)
    });
    run.check("witness-moments", "epr-state", |m| {
        m.num("e_moment", meas.e_moment);
        m.num("f_moment", meas.f_moment);
        let zero = m.zero();
        Ok(meas.e_moment < zero && meas.f_moment < zero)
    });
    run.check("witness-commutator-moduli", "incommensurable-pairs", |m| {
        m.num("e1_f1", meas.moduli[0]);
        m.num("e2_f2", meas.moduli[1]);
        let zero = m.zero();
        Ok(meas.moduli.iter().all(|&x| x > zero))
    });

    let pairs = w.e_pair(&run.tol).and_then(|e| Ok((e, w.f_pair(&run.tol)?)));
    match pairs {
        Ok((e_pair, f_pair)) => run_pair_suite(
            run,
            PairSuite {
                state: &w.state,
                pair1: &e_pair,
                pair2: Some(&f_pair),
                pool: None,
            },
            &opts,
            r.seed,
        ),
        Err(e) => {
            run.check("witness-pairs", "epr-witness-construction", |_| Err(e));
        }
    }
}

fn run_weyl(run: &mut Runner, r: &ResolvedScenario, d: usize, u: i64, v: i64, a: i64, b: i64) {
    let opts = options(r);
    run.check("weyl-relation", "weyl-commutation", |m| {
        let sys = WeylSystem::new(d)?;
        let w = sys.weyl_residual();
        let o = sys.order_residual();
        m.put("d", d);
        m.num("weyl_residual", w);
        m.num("order_residual", o);
        let zero = m.zero();
        Ok(w < zero && o < zero)
    });
    let state = match FiniteEprState::new(d, u, v) {
        Ok(s) => s,
        Err(e) => {
            run.check("correlator-grid", "offset-epr-state", |_| Err(e));
            return;
        }
    };
    run.check("correlator-grid", "offset-epr-state", |m| {
        let res = state.correlator_residual();
        m.put("u", state.u);
        m.put("v", state.v);
        m.put("grid_size", d * d);
        m.num("residual", res);
        Ok(res < m.zero())
    });

    let mut exclusion = None;
    run.check("weyl-exclusion", "weyl-exclusion", |m| {
        let rep = weyl_exclusion(&state, a, b, &opts, &m.tol)?;
        m.put("a", a);
        m.put("b", b);
        m.num("measured_modulus", rep.measured_modulus);
        m.num("contradiction_magnitude", rep.contradiction_magnitude);
        m.num("numeric_magnitude", rep.numeric_magnitude);
        let zero = m.zero();
        let agree = (rep.numeric_magnitude - rep.contradiction_magnitude).abs() < zero
            && (rep.measured_modulus - rep.contradiction_magnitude.powi(2)).abs() < zero;
        let ok = rep.measured_modulus > zero && agree;
        exclusion = Some(rep);
        Ok(ok)
    });

    match &exclusion {
        Some(rep) => {
            run.check("offset-epr", "epr-state", |m| {
                let dg = &rep.epr;
                m.num("moment", dg.moment);
                m.num("diagonal_mass", dg.diagonal_mass);
                m.num("grid_residual", dg.grid_residual);
                m.put("characterizations_agree", dg.consistent());
                m.zero();
                m.feas();
                Ok(dg.is_epr && dg.diagonal_ok && dg.grid_ok)
            });
            run.check("partner-commutation", "partner-commutation", |m| {
                m.zero();
                m.rank();
                m.feas();
                match (&rep.partner_commutation, &rep.partner_commutation_error) {
                    (Some(pc), _) => {
                        m.num("max_modulus", pc.max_modulus);
                        m.put("powers_exhaustive", pc.powers_exhaustive);
                        m.num("fixed_vector_deviation", pc.fixed_vector_deviation);
                        m.num("flow_invariance", pc.flow_invariance);
                        m.num("derivative_membership", pc.derivative_membership);
                        m.put("beable_ok", pc.premise.beable_ok);
                        m.put("a_priv_ok", pc.premise.a_priv_ok);
                        m.put("def_ok", pc.premise.def_ok);
                        Ok(pc.passed())
                    }
                    (None, Some(e)) => Err(Error::PremiseFailure(e.clone())),
                    (None, None) => Ok(false),
                }
            });
            run.witness("weyl_exclusion", rep);
        }
        None => {
            run.skip("offset-epr", "epr-state", "exclusion report unavailable");
            run.skip("partner-commutation", "partner-commutation", "exclusion report unavailable");
        }
    }

    run.check("exclusion-monotonicity", "weyl-exclusion", |m| {
        let zero = m.zero();
        let mut mismatches = Vec::new();
        let mut smallest_nonzero = f64::INFINITY;
        for x in 0..d as i64 {
            for y in 0..d as i64 {
                let modulus = state.commutator_modulus(x, y);
                let degenerate = (x * y).rem_euclid(d as i64) == 0;
                if !degenerate {
                    smallest_nonzero = smallest_nonzero.min(modulus);
                }
                if (modulus > zero) == degenerate {
                    mismatches.push([x, y]);
                }
            }
        }
        m.num("smallest_nondegenerate_modulus", smallest_nonzero);
        m.put("mismatches", &mismatches);
        Ok(mismatches.is_empty())
    });

    run.check("function-transport", "function-transport", |m| {
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let mut indicator = vec![ZERO; d];
        indicator[0] = C64::new(1.0, 0.0);
        let mut fs = vec![indicator, vec![C64::new(1.0, 0.0); d]];
        fs.extend((0..3).map(|_| (0..d).map(|_| complex_normal(&mut rng)).collect()));
        let residuals = finite_ap_transport(&state, &fs)?;
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        m.put("residuals", &residuals);
        m.num("max_residual", worst);
        Ok(worst < m.feas())
    });
}

fn run_custom(
    run: &mut Runner,
    r: &ResolvedScenario,
    state: &CustomState,
    pair1: &(Operator, Operator),
    pair2: &Option<(Operator, Operator)>,
    pool: &Option<Vec<Operator>>,
) {
    let opts = options(r);
    let mut setup = None;
    run.check("scenario-setup", "scenario-setup", |m| {
        let tol = m.tol;
        let phi = match state {
            CustomState::Vector(v) => State::vector(v.clone(), &tol)?,
            CustomState::Density(rho) => State::from_density(rho.clone(), &tol)?,
        };
        let p1 = CommutingPair::new(pair1.0.clone(), pair1.1.clone(), &tol)?;
        let p2 = match pair2 {
            Some((a, b)) => Some(CommutingPair::new(a.clone(), b.clone(), &tol)?),
            None => None,
        };
        m.put("dim", phi.dim());
        m.put("vector_state", phi.inducing_vector().is_some());
        m.zero();
        setup = Some((phi, p1, p2));
        Ok(true)
    });
    let Some((phi, p1, p2)) = setup else {
        return;
    };
    run_pair_suite(
        run,
        PairSuite {
            state: &phi,
            pair1: &p1,
            pair2: p2.as_ref(),
            pool: pool.as_deref(),
        },
        &opts,
        r.seed,
    );
}

/// Runs a validated scenario. Numerical failures become failed checks.
pub fn execute(r: &ResolvedScenario) -> Report {
    let mut run = Runner {
        tol: r.tolerances,
        timing: r.timing,
        checks: Vec::new(),
        witnesses: BTreeMap::new(),
    };
    match &r.spec {
        ScenarioSpec::Singlet => run_singlet(&mut run, r),
        ScenarioSpec::Theorem1 {
            sites,
            region1,
            region2,
        } => run_theorem1(&mut run, r, sites, region1, region2),
        ScenarioSpec::WeylFinite { d, u, v, a, b } => run_weyl(&mut run, r, *d, *u, *v, *a, *b),
        ScenarioSpec::Custom {
            state,
            pair1,
            pair2,
            pool,
        } => run_custom(&mut run, r, state, pair1, pair2, pool),
    }
    let failed = run.checks.iter().any(|c| c.status == Status::Fail);
    Report {
        schema: SCHEMA.to_string(),
        scenario: r.name.clone(),
        kind: r.kind,
        seed: r.seed,
        status: if failed { Status::Fail } else { Status::Pass },
        tolerances: r.tolerances,
        checks: run.checks,
        witnesses: run.witnesses,
    }
}

/// Validates `config` with default settings and runs it.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Report> {
    run_with(config, &RunSettings::default())
}

pub fn run_with(config: &ScenarioConfig, settings: &RunSettings) -> Result<Report> {
    Ok(execute(&config.resolve(settings)?))
}
