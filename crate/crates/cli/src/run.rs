use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use onm_core::analysis::AssumptionChecklist;
use onm_core::experiment::{
    run_experiment, AlgorithmKind, AlgorithmSummary, BoundSummary, Execution, ExperimentConfig, ExperimentReport,
};
use onm_core::linalg::Vector;

use crate::{CliError, RunArgs};

pub const REGRET_FILE: &str = "regret.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub config_path: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub tool_version: String,
    /// `SOURCE_DATE_EPOCH` when set, so that reruns stay byte-identical.
    pub timestamp: Option<u64>,
    pub output_dir: String,
}

/// Reads, overrides and validates an experiment config.
pub fn load_config(
    path: &Path,
    seed: Option<u64>,
    replications: Option<usize>,
) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut config: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(n) = replications {
        config.replications = n;
    }
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub report: ExperimentReport,
    pub files: Vec<PathBuf>,
}

/// Runs the experiment and writes the four output files. Nothing is
/// written unless the config is valid and some replication completed.
pub fn cmd_run(args: &RunArgs) -> Result<RunOutputs, CliError> {
    let config = load_config(&args.config, args.seed, args.replications)?;
    let report = run_experiment(&config, Execution::from_threads(args.threads))
        .map_err(|e| CliError::Config(e.to_string()))?;
    if report.completed == 0 {
        let first = failure_messages(&report).into_iter().next().unwrap_or_default();
        return Err(CliError::Runtime(format!("no replication completed; first failure: {first}")));
    }

    let manifest = RunManifest {
        config_path: args.config.display().to_string(),
        master_seed: config.master_seed,
        config,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()),
        output_dir: args.out.display().to_string(),
    };

    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let outputs = [
        (REGRET_FILE, regret_csv(&report)),
        (TRAJECTORY_FILE, trajectory_csv(&report)),
        (SUMMARY_FILE, summary_json(&report, &manifest)),
        (MANIFEST_FILE, to_json(&manifest)),
    ];
    let mut files = Vec::new();
    for (name, contents) in outputs {
        let path = args.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }
    Ok(RunOutputs { report, files })
}

/// Round-trip exact: 17 significant digits.
fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t, onm_regret_mean, onm_regret_stderr, ogd_regret_mean, ogd_regret_stderr`.
/// Columns of an algorithm that was not run are left empty.
pub fn regret_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("t,onm_regret_mean,onm_regret_stderr,ogd_regret_mean,ogd_regret_stderr\n");
    let column = |kind, t: usize| {
        report.curves.get(&kind).map_or_else(
            || ",".to_string(),
            |c| format!("{},{}", number(c.mean[t]), number(c.stderr[t])),
        )
    };
    for t in 0..=report.config.horizon {
        let _ = writeln!(out, "{t},{},{}", column(AlgorithmKind::Onm, t), column(AlgorithmKind::Ogd, t));
    }
    out
}

/// `t, replication, target_x, target_y, onm_x, onm_y, ogd_x, ogd_y` for
/// the first `trajectory_replications` complete replications.
pub fn trajectory_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("t,replication,target_x,target_y,onm_x,onm_y,ogd_x,ogd_y\n");
    let xy = |p: Option<&Vector>| match p {
        Some(p) => (0..2).map(|i| p.as_slice().get(i).map_or_else(String::new, |&v| number(v))).collect::<Vec<_>>().join(","),
        None => ",".to_string(),
    };
    for rep in report.complete().take(report.config.trajectory_replications) {
        let decisions = |kind| rep.run(kind).map(|r| &r.ledger.records);
        let (onm, ogd) = (decisions(AlgorithmKind::Onm), decisions(AlgorithmKind::Ogd));
        for (t, target) in rep.targets.iter().enumerate() {
            let _ = writeln!(
                out,
                "{t},{},{},{},{}",
                rep.index,
                xy(Some(target)),
                xy(onm.map(|r| &r[t].x)),
                xy(ogd.map(|r| &r[t].x)),
            );
        }
    }
    out
}

#[derive(Debug, Serialize)]
struct ReplicationCounts {
    requested: usize,
    completed: usize,
    partial: usize,
    failed: usize,
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    name: &'a str,
    master_seed: u64,
    horizon: usize,
    replications: ReplicationCounts,
    algorithms: &'a [AlgorithmSummary],
    /// Mean realized `V_T` of the round optima.
    total_variation_mean: Option<f64>,
    bounds: &'a BoundSummary,
    assumption_checklist: Option<&'a AssumptionChecklist>,
    failures: Vec<String>,
    manifest: &'a RunManifest,
}

pub fn summary_json(report: &ExperimentReport, manifest: &RunManifest) -> String {
    let summary = RunSummary {
        name: &report.config.name,
        master_seed: report.config.master_seed,
        horizon: report.config.horizon,
        replications: ReplicationCounts {
            requested: report.replications.len(),
            completed: report.completed,
            partial: report.partial,
            failed: report.failed,
        },
        algorithms: &report.summaries,
        total_variation_mean: report.summaries.first().map(|s| s.total_variation_mean),
        bounds: &report.bounds,
        assumption_checklist: report.bounds.checklist.as_ref(),
        failures: failure_messages(report),
        manifest,
    };
    to_json(&summary)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn failure_messages(report: &ExperimentReport) -> Vec<String> {
    let mut out = Vec::new();
    for rep in &report.replications {
        match rep {
            Err(e) => out.push(e.to_string()),
            Ok(r) => {
                for run in &r.runs {
                    if let Some(f) = &run.failure {
                        out.push(format!("replication {} {}: {f}", r.index, run.algorithm.name()));
                    }
                }
            }
        }
    }
    out
}

/// Human-readable lines for the terminal.
pub fn run_digest(outputs: &RunOutputs) -> String {
    let r = &outputs.report;
    let mut out = format!(
        "{}: {} replications ({} complete, {} partial, {} failed), T = {}\n",
        r.config.name,
        r.replications.len(),
        r.completed,
        r.partial,
        r.failed,
        r.config.horizon
    );
    for s in &r.summaries {
        let _ = writeln!(
            out,
            "  {} final regret {:.6e} +- {:.2e}, final tracking error mean {:.3e}",
            s.algorithm.name(),
            s.final_regret_mean,
            s.final_regret_stderr,
            s.final_tracking_error_mean
        );
    }
    let b = &r.bounds;
    let _ = writeln!(
        out,
        "  bounds: {} evaluated, {} checklists pass, general bound violations {}, constant bound applicable {} (violations {})",
        b.evaluated, b.checklist_passed, b.theorem1_violations, b.corollary1_applicable, b.corollary1_violations
    );
    for f in &outputs.files {
        let _ = writeln!(out, "  wrote {}", f.display());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.5e-300, -7.0, 0.0] {
            assert_eq!(number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(number(0.25), "2.5000000000000000e-1");
    }
}
