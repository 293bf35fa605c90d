use std::path::Path;
use std::process::ExitCode;

use beable_lab::report::{builtin, emit_reports, execute, list_builtin_scenarios, ResolvedScenario, RunSettings};
use beable_lab::{Error, Report, ReportFormat, ScenarioConfig, ToleranceConfig};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "beable-lab", version, about = "Construct and verify EPR states, beable subalgebras and exclusion results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios given as config files or built-in names.
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        opts: RunArgs,
    },
    /// List built-in scenarios.
    List,
    /// Run every built-in scenario.
    VerifyAll {
        #[command(flatten)]
        opts: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "X")]
    tol_zero: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_feas: Option<f64>,
    #[arg(long, value_name = "X")]
    tol_rank: Option<f64>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    max_power: Option<usize>,
    #[arg(long, default_value = "json", value_name = "json|text")]
    format: String,
    /// Number of scenarios to run concurrently.
    #[arg(long, default_value_t = 1, value_name = "N")]
    parallel: usize,
    /// Record per-check wall time (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn settings(&self) -> RunSettings {
        let mut tolerances = beable_lab::report::config::ToleranceOverrides::default();
        tolerances.eps_zero = self.tol_zero;
        tolerances.eps_feas = self.tol_feas;
        tolerances.eps_rank = self.tol_rank;
        RunSettings {
            tolerances,
            seed: self.seed,
            max_power: self.max_power,
            timing: self.timing,
        }
    }
}

fn load(target: &str) -> Result<ScenarioConfig, Error> {
    if let Some(config) = builtin(target) {
        return Ok(config);
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Error::InvalidConfig {
            field: "target".into(),
            message: format!("`{target}` is neither a built-in scenario nor a readable file"),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig {
        field: "target".into(),
        message: format!("cannot read `{target}`: {e}"),
    })?;
    ScenarioConfig::from_json(&text)
}

fn run(configs: Vec<ScenarioConfig>, opts: &RunArgs) -> Result<ExitCode, Error> {
    let format: ReportFormat = opts.format.parse()?;
    if opts.parallel == 0 {
        return Err(Error::InvalidConfig {
            field: "--parallel".into(),
            message: "must be at least 1".into(),
        });
    }
    let settings = opts.settings();
    let resolved: Vec<ResolvedScenario> = configs
        .iter()
        .map(|c| c.resolve(&settings))
        .collect::<Result<_, _>>()?;
    let reports: Vec<Report> = if opts.parallel == 1 {
        resolved.iter().map(execute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallel)
            .build()
            .map_err(|e| Error::InvalidConfig {
                field: "--parallel".into(),
                message: e.to_string(),
            })?;
        pool.install(|| resolved.par_iter().map(execute).collect())
    };
    let emitted = if reports.len() == 1 {
        beable_lab::emit_report(&reports[0], format)
    } else {
        emit_reports(&reports, format)
    };
    print!("{emitted}");
    for report in &reports {
        for check in report.failed_checks() {
            eprintln!("FAIL {}: {} [{}]", report.scenario, check.id, check.anchor);
        }
    }
    Ok(if reports.iter().all(Report::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::List => {
            let defaults = ToleranceConfig::default();
            for c in list_builtin_scenarios() {
                let tol = c.tolerances.apply(defaults);
                println!(
                    "{:<24} {:<12} eps_zero={:e} {}",
                    c.name,
                    c.kind.as_str(),
                    tol.eps_zero,
                    c.description.unwrap_or_default()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { targets, opts } => targets
            .iter()
            .map(|t| load(t))
            .collect::<Result<Vec<_>, _>>()
            .and_then(|configs| run(configs, &opts)),
        Command::VerifyAll { opts } => run(list_builtin_scenarios(), &opts),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
