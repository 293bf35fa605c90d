//! Scenario configuration: JSON ingestion and field-level validation.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::matrix::{vector_from_value, Operator, Vector};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Singlet,
    Theorem1,
    WeylFinite,
    Custom,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Singlet => "singlet",
            ScenarioKind::Theorem1 => "theorem1",
            ScenarioKind::WeylFinite => "weyl_finite",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// Partial tolerance settings; unset fields fall through to the next layer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_zero: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rank: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_feas: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut base: ToleranceConfig) -> ToleranceConfig {
        if let Some(x) = self.eps_zero {
            base.eps_zero = x;
        }
        if let Some(x) = self.eps_rank {
            base.eps_rank = x;
        }
        if let Some(x) = self.eps_feas {
            base.eps_feas = x;
        }
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

/// Command-line layer applied on top of a configuration.
#[derive(Debug, Clone, Default)]
pub struct RunSettings {
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
    pub max_power: Option<usize>,
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub enum CustomState {
    Vector(Vector),
    Density(Operator),
}

#[derive(Debug, Clone)]
pub enum ScenarioSpec {
    Singlet,
    Theorem1 {
        sites: Vec<usize>,
        region1: Vec<usize>,
        region2: Vec<usize>,
    },
    WeylFinite {
        d: usize,
        u: i64,
        v: i64,
        a: i64,
        b: i64,
    },
    Custom {
        state: CustomState,
        pair1: (Operator, Operator),
        pair2: Option<(Operator, Operator)>,
        pool: Option<Vec<Operator>>,
    },
}

/// A validated configuration with every layer of settings folded in.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub spec: ScenarioSpec,
    pub tolerances: ToleranceConfig,
    pub max_power: usize,
    pub symmetry_samples: usize,
    pub seed: u64,
    pub timing: bool,
}

const COMMON_KEYS: [&str; 3] = ["max_power", "n_symmetry_samples", "seed"];
const MAX_AMBIENT_DIM: usize = 64;
const MAX_WEYL_DIM: usize = 16;

fn field(key: &str) -> String {
    format!("parameters.{key}")
}

fn get_uint(params: &Map<String, Value>, key: &str) -> Result<Option<u64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| Error::config(field(key), "expected a nonnegative integer")),
    }
}

fn get_int(params: &Map<String, Value>, key: &str) -> Result<Option<i64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_i64()
            .map(Some)
            .ok_or_else(|| Error::config(field(key), "expected an integer")),
    }
}

fn get_uint_list(params: &Map<String, Value>, key: &str) -> Result<Option<Vec<usize>>> {
    let Some(v) = params.get(key) else {
        return Ok(None);
    };
    let items = v
        .as_array()
        .ok_or_else(|| Error::config(field(key), "expected an array of nonnegative integers"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::config(format!("{}[{i}]", field(key)), "expected a nonnegative integer"))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn get_matrix(value: &Value, path: &str) -> Result<Operator> {
    serde_json::from_value::<Operator>(value.clone()).map_err(|e| Error::config(path, format!("invalid matrix literal: {e}")))
}

fn get_pair(params: &Map<String, Value>, key: &str) -> Result<Option<(Operator, Operator)>> {
    let Some(v) = params.get(key) else {
        return Ok(None);
    };
    let items = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::config(field(key), "expected an array of two matrix literals"))?;
    let a = get_matrix(&items[0], &format!("{}[0]", field(key)))?;
    let b = get_matrix(&items[1], &format!("{}[1]", field(key)))?;
    Ok(Some((a, b)))
}

fn check_keys(params: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) && !COMMON_KEYS.contains(&key.as_str()) {
            return Err(Error::config(field(key), "unknown parameter for this kind"));
        }
    }
    Ok(())
}

fn validate_regions(sites: &[usize], region1: &[usize], region2: &[usize], min_gap: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::config(field("sites"), "at least one site is required"));
    }
    if let Some(i) = sites.iter().position(|&d| d < 2) {
        return Err(Error::config(format!("{}[{i}]", field("sites")), "site dimension must be at least 2"));
    }
    let ambient: usize = sites.iter().product();
    if ambient > MAX_AMBIENT_DIM {
        return Err(Error::config(
            field("sites"),
            format!("ambient dimension {ambient} exceeds {MAX_AMBIENT_DIM}"),
        ));
    }
    for (key, region) in [("region1", region1), ("region2", region2)] {
        if region.is_empty() {
            return Err(Error::config(field(key), "region must contain at least one site"));
        }
        if let Some(&s) = region.iter().find(|&&s| s >= sites.len()) {
            return Err(Error::config(field(key), format!("site index {s} out of range")));
        }
        let mut sorted = region.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != region.len() {
            return Err(Error::config(field(key), "duplicate site index"));
        }
    }
    for &a in region1 {
        for &b in region2 {
            if a == b {
                return Err(Error::config(field("region2"), format!("site {a} belongs to both regions")));
            }
            if a.abs_diff(b) <= min_gap {
                return Err(Error::config(
                    field("min_gap"),
                    format!("sites {a} and {b} are closer than the required gap {min_gap}"),
                ));
            }
        }
    }
    Ok(())
}

fn theorem1_spec(params: &Map<String, Value>) -> Result<ScenarioSpec> {
    check_keys(params, &["dims", "sites", "region1", "region2", "min_gap"])?;
    let dims = get_uint_list(params, "dims")?;
    let sites = get_uint_list(params, "sites")?;
    let (sites, region1, region2) = match (dims, sites) {
        (Some(_), Some(_)) => return Err(Error::config(field("dims"), "give either `dims` or `sites`, not both")),
        (Some(dims), None) => {
            if dims.len() != 2 {
                return Err(Error::config(field("dims"), "expected two factor dimensions"));
            }
            if params.contains_key("region1") || params.contains_key("region2") {
                return Err(Error::config(field("dims"), "regions are implied by `dims`"));
            }
            (dims, vec![0], vec![1])
        }
        (None, Some(sites)) => {
            let r1 = get_uint_list(params, "region1")?.ok_or_else(|| Error::config(field("region1"), "required with `sites`"))?;
            let r2 = get_uint_list(params, "region2")?.ok_or_else(|| Error::config(field("region2"), "required with `sites`"))?;
            (sites, r1, r2)
        }
        (None, None) => return Err(Error::config(field("dims"), "either `dims` or `sites` is required")),
    };
    let min_gap = get_uint(params, "min_gap")?.unwrap_or(0) as usize;
    validate_regions(&sites, &region1, &region2, min_gap)?;
    Ok(ScenarioSpec::Theorem1 { sites, region1, region2 })
}

fn weyl_spec(params: &Map<String, Value>) -> Result<ScenarioSpec> {
    check_keys(params, &["d", "u", "v", "a", "b"])?;
    let d = get_uint(params, "d")?.ok_or_else(|| Error::config(field("d"), "required"))? as usize;
    if !(2..=MAX_WEYL_DIM).contains(&d) {
        return Err(Error::config(field("d"), format!("must be between 2 and {MAX_WEYL_DIM}")));
    }
    let u = get_int(params, "u")?.unwrap_or(0);
    let v = get_int(params, "v")?.unwrap_or(0);
    let a = get_int(params, "a")?.unwrap_or(1);
    let b = get_int(params, "b")?.unwrap_or(1);
    if (a * b).rem_euclid(d as i64) == 0 {
        return Err(Error::config(field("a"), format!("a*b = {} is 0 mod {d}", a * b)));
    }
    Ok(ScenarioSpec::WeylFinite { d, u, v, a, b })
}

fn custom_spec(params: &Map<String, Value>) -> Result<ScenarioSpec> {
    check_keys(params, &["state", "density", "pair1", "pair2", "pool"])?;
    let state = match (params.get("state"), params.get("density")) {
        (Some(v), None) => CustomState::Vector(vector_from_value(v).map_err(|m| Error::config(field("state"), m))?),
        (None, Some(m)) => CustomState::Density(get_matrix(m, &field("density"))?),
        (Some(_), Some(_)) => return Err(Error::config(field("state"), "give either `state` or `density`, not both")),
        (None, None) => return Err(Error::config(field("state"), "a `state` vector or `density` matrix is required")),
    };
    let n = match &state {
        CustomState::Vector(v) => v.len(),
        CustomState::Density(m) => m.dim(),
    };
    if n > MAX_AMBIENT_DIM {
        return Err(Error::config(field("state"), format!("dimension {n} exceeds {MAX_AMBIENT_DIM}")));
    }
    let pair1 = get_pair(params, "pair1")?.ok_or_else(|| Error::config(field("pair1"), "required"))?;
    let pair2 = get_pair(params, "pair2")?;
    let pool = match params.get("pool") {
        None => None,
        Some(v) => {
            let items = v
                .as_array()
                .ok_or_else(|| Error::config(field("pool"), "expected an array of matrix literals"))?;
            Some(
                items
                    .iter()
                    .enumerate()
                    .map(|(i, m)| get_matrix(m, &format!("{}[{i}]", field("pool"))))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
    };
    let mut mats: Vec<(String, &Operator)> = vec![
        (format!("{}[0]", field("pair1")), &pair1.0),
        (format!("{}[1]", field("pair1")), &pair1.1),
    ];
    if let Some(p) = &pair2 {
        mats.push((format!("{}[0]", field("pair2")), &p.0));
        mats.push((format!("{}[1]", field("pair2")), &p.1));
    }
    if let Some(pool) = &pool {
        for (i, m) in pool.iter().enumerate() {
            mats.push((format!("{}[{i}]", field("pool")), m));
        }
    }
    for (path, m) in mats {
        if m.dim() != n {
            return Err(Error::config(path, format!("matrix is {}x{0}, state dimension is {n}", m.dim())));
        }
    }
    Ok(ScenarioSpec::Custom {
        state,
        pair1,
        pair2,
        pool,
    })
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validates parameters and folds in the command-line layer.
    pub fn resolve(&self, settings: &RunSettings) -> Result<ResolvedScenario> {
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        let params = &self.parameters;
        let spec = match self.kind {
            ScenarioKind::Singlet => {
                check_keys(params, &[])?;
                ScenarioSpec::Singlet
            }
            ScenarioKind::Theorem1 => theorem1_spec(params)?,
            ScenarioKind::WeylFinite => weyl_spec(params)?,
            ScenarioKind::Custom => custom_spec(params)?,
        };
        let tolerances = settings.tolerances.apply(self.tolerances.apply(ToleranceConfig::default()));
        tolerances.validate()?;
        let max_power = match settings.max_power {
            Some(p) => p,
            None => get_uint(params, "max_power")?.unwrap_or(4) as usize,
        };
        if !(1..=16).contains(&max_power) {
            return Err(Error::config(field("max_power"), "must be between 1 and 16"));
        }
        let symmetry_samples = get_uint(params, "n_symmetry_samples")?.unwrap_or(16) as usize;
        if symmetry_samples > 1024 {
            return Err(Error::config(field("n_symmetry_samples"), "at most 1024"));
        }
        let seed = match settings.seed {
            Some(s) => s,
            None => get_uint(params, "seed")?.unwrap_or(0),
        };
        Ok(ResolvedScenario {
            name: self.name.clone(),
            kind: self.kind,
            spec,
            tolerances,
            max_power,
            symmetry_samples,
            seed,
            timing: settings.timing,
        })
    }
}
