//! Built-in scenarios.

use serde_json::{json, Map, Value};

use super::config::{ScenarioConfig, ScenarioKind, ToleranceOverrides};

fn scenario(name: &str, kind: ScenarioKind, description: &str, parameters: Value) -> ScenarioConfig {
    let parameters: Map<String, Value> = match parameters {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    ScenarioConfig {
        name: name.to_string(),
        kind,
        description: Some(description.to_string()),
        parameters,
        tolerances: ToleranceOverrides::default(),
    }
}

pub fn list_builtin_scenarios() -> Vec<ScenarioConfig> {
    vec![
        scenario(
            "bohm-singlet",
            ScenarioKind::Singlet,
            "spin singlet with spin projections along two orthogonal axes on each side",
            json!({}),
        ),
        scenario(
            "theorem1-2x2",
            ScenarioKind::Theorem1,
            "EPR witness from the two factors of M2 (x) M2",
            json!({"dims": [2, 2]}),
        ),
        scenario(
            "theorem1-3x3",
            ScenarioKind::Theorem1,
            "EPR witness from the two factors of M3 (x) M3",
            json!({"dims": [3, 3]}),
        ),
        scenario(
            "theorem1-2x3",
            ScenarioKind::Theorem1,
            "EPR witness from factors of unequal size",
            json!({"dims": [2, 3]}),
        ),
        scenario(
            "lattice-local-algebras",
            ScenarioKind::Theorem1,
            "three-site qubit chain; witness from the end sites with a spectator between them",
            json!({"sites": [2, 2, 2], "region1": [0], "region2": [2], "min_gap": 1}),
        ),
        scenario(
            "weyl-d2",
            ScenarioKind::WeylFinite,
            "clock-and-shift system with d = 2",
            json!({"d": 2}),
        ),
        scenario(
            "weyl-d3",
            ScenarioKind::WeylFinite,
            "clock-and-shift system with d = 3",
            json!({"d": 3}),
        ),
        scenario(
            "weyl-d5",
            ScenarioKind::WeylFinite,
            "clock-and-shift system with d = 5 and offsets (u, v) = (2, 1)",
            json!({"d": 5, "u": 2, "v": 1}),
        ),
    ]
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    list_builtin_scenarios().into_iter().find(|c| c.name == name)
}
