use std::process::{Command, Output};

use beable_lab::report::{anchors, builtin, emit_report, list_builtin_scenarios, run_scenario, Report, ReportFormat, Status};
use beable_lab::{Error, ScenarioConfig, ToleranceConfig};
use serde_json::{json, Value};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beable-lab")).args(args).output().expect("binary runs")
}

fn config(value: Value) -> ScenarioConfig {
    ScenarioConfig::from_json(&value.to_string()).unwrap()
}

fn field_of(err: Error) -> String {
    match err {
        Error::InvalidConfig { field, .. } => field,
        other => panic!("expected a config error, got {other:?}"),
    }
}

/// Spin-half singlet with sigma_z / sigma_x on each side, written out by hand.
fn custom_singlet() -> Value {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = |s: f64| {
        json!([[s, 0, 0, 0], [0, s, 0, 0], [0, 0, -s, 0], [0, 0, 0, -s]])
    };
    let z1 = z(1.0);
    let z2 = json!([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]]);
    let x1 = json!([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]);
    let x2 = json!([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]);
    let neg = |m: &Value| -> Value {
        Value::Array(
            m.as_array()
                .unwrap()
                .iter()
                .map(|r| Value::Array(r.as_array().unwrap().iter().map(|x| json!(-x.as_f64().unwrap())).collect()))
                .collect(),
        )
    };
    json!({
        "name": "hand-singlet",
        "kind": "custom",
        "parameters": {
            "state": [0, h, -h, 0],
            "pair1": [z1, neg(&z2)],
            "pair2": [x1, neg(&x2)],
        }
    })
}

#[test]
fn every_builtin_passes_with_known_anchors() {
    for c in list_builtin_scenarios() {
        let report = run_scenario(&c).unwrap();
        assert!(report.passed(), "{}: {:?}", c.name, report.failed_checks());
        assert!(!report.checks.is_empty());
        for check in &report.checks {
            assert!(anchors::is_known(&check.anchor), "{} uses unknown anchor {}", check.id, check.anchor);
        }
    }
}

#[test]
fn json_round_trips_and_records_tolerances() {
    let report = run_scenario(&builtin("bohm-singlet").unwrap()).unwrap();
    let text = emit_report(&report, ReportFormat::Json);
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(emit_report(&back, ReportFormat::Json), text);
    assert_eq!(back.checks.len(), report.checks.len());
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["schema"], "beable-lab/1");
    let defaults = ToleranceConfig::default();
    assert_eq!(value["tolerances"]["eps_zero"].as_f64(), Some(defaults.eps_zero));
    assert_eq!(value["tolerances"]["eps_feas"].as_f64(), Some(defaults.eps_feas));
    assert_eq!(value["tolerances"]["eps_rank"].as_f64(), Some(defaults.eps_rank));
}

#[test]
fn text_has_one_line_per_check() {
    let report = run_scenario(&builtin("weyl-d3").unwrap()).unwrap();
    let text = emit_report(&report, ReportFormat::Text);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), report.checks.len() + 1);
    for (line, check) in lines[1..].iter().zip(&report.checks) {
        assert!(line.contains(&check.id) && line.contains(check.status.as_str()));
    }
}

#[test]
fn hand_written_singlet_passes() {
    let report = run_scenario(&config(custom_singlet())).unwrap();
    assert!(report.passed(), "{:?}", report.failed_checks());
    assert_eq!(report.check("exclusion-first-candidate").unwrap().status, Status::Pass);
}

#[test]
fn config_errors_name_the_field() {
    let cases = [
        (json!({"name": "x", "kind": "weyl_finite", "parameters": {"d": 1}}), "parameters.d"),
        (json!({"name": "x", "kind": "weyl_finite", "parameters": {"d": 4, "a": 2, "b": 2}}), "parameters.a"),
        (json!({"name": "x", "kind": "theorem1", "parameters": {"dims": [2]}}), "parameters.dims"),
        (json!({"name": "x", "kind": "theorem1", "parameters": {"sites": [2, 1], "region1": [0], "region2": [1]}}), "parameters.sites[1]"),
        (json!({"name": "x", "kind": "theorem1", "parameters": {"sites": [2, 2], "region1": [0], "region2": [1], "min_gap": 1}}), "parameters.min_gap"),
        (json!({"name": "x", "kind": "singlet", "parameters": {"d": 2}}), "parameters.d"),
        (json!({"name": "x", "kind": "custom", "parameters": {"state": [1, 0], "pair1": [[[1]], [[1]]]}}), "parameters.pair1[0]"),
        (json!({"name": "", "kind": "singlet"}), "name"),
    ];
    for (value, field) in cases {
        let err = config(value.clone()).resolve(&Default::default()).unwrap_err();
        assert_eq!(field_of(err), field, "{value}");
    }
    let err = ScenarioConfig::from_json(r#"{"name":"x","kind":"singlet","extra":1}"#).unwrap_err();
    assert_eq!(field_of(err), "<root>");
}

#[test]
fn cli_runs_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("singlet.json");
    std::fs::write(&good, custom_singlet().to_string()).unwrap();
    let out = cli(&["run", good.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("scenario hand-singlet (custom)"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, json!({"name": "x", "kind": "weyl_finite", "parameters": {}}).to_string()).unwrap();
    let out = cli(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameters.d"));

    assert_eq!(cli(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "weyl-d2", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "weyl-d2", "--parallel", "0"]).status.code(), Some(2));
    assert_eq!(cli(&["run", "weyl-d2", "--tol-zero", "-1"]).status.code(), Some(2));
    assert_eq!(cli(&["bogus"]).status.code(), Some(2));
}

#[test]
fn cli_parallel_matches_sequential() {
    let names = ["bohm-singlet", "theorem1-2x2", "weyl-d2", "weyl-d3"];
    let mut seq = vec!["run"];
    seq.extend(names);
    let mut par = seq.clone();
    par.extend(["--parallel", "4"]);
    let a = cli(&seq);
    let b = cli(&par);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let reports: Vec<Report> = serde_json::from_slice(&a.stdout).unwrap();
    let order: Vec<&str> = reports.iter().map(|r| r.scenario.as_str()).collect();
    assert_eq!(order, names);
}

#[test]
fn cli_lists_builtins() {
    let out = cli(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for c in list_builtin_scenarios() {
        assert!(text.lines().any(|l| l.starts_with(&c.name)), "missing {}", c.name);
    }
}

#[test]
fn timing_is_opt_in() {
    let plain = cli(&["run", "weyl-d2"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("timing_ms"));
    let timed = cli(&["run", "weyl-d2", "--timing"]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timing_ms"));
}
