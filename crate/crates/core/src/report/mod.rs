//! Scenario configuration, execution and report output.

pub mod anchors;
pub mod builtin;
pub mod config;
pub mod emit;
pub mod run;

pub use builtin::{builtin, list_builtin_scenarios};
pub use config::{ResolvedScenario, RunSettings, ScenarioConfig, ScenarioKind, ScenarioSpec};
pub use emit::{emit_report, emit_reports, ReportFormat};
pub use run::{execute, run_scenario, run_with, Check, Report, Status};
