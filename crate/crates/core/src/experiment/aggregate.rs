use std::collections::BTreeMap;

use serde::Serialize;

use super::{run_replication, AlgorithmKind, ConfigError, ExperimentConfig, ReplicationError, ReplicationResult};
use crate::analysis::{corollary1_bound, AssumptionChecklist};
use crate::oracle::RegularityConstants;

/// Slack allowed when checking realized quantities against bounds.
const BOUND_SLACK: f64 = 1e-6;

/// How replications are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Work-stealing pool with `threads` workers (0: one per core). Runs
    /// serially when the crate is built without the `parallel` feature.
    Parallel { threads: usize },
}

impl Execution {
    /// `threads == 1` is serial, anything else parallel.
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 {
            Execution::Serial
        } else {
            Execution::Parallel { threads }
        }
    }
}

/// Per-round mean and standard error of the cumulative regret.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: AlgorithmKind,
    pub replications: usize,
    pub final_regret_mean: f64,
    pub final_regret_stderr: f64,
    pub total_variation_mean: f64,
    pub error_sum_mean: f64,
    /// Distance from the last decision to the true target.
    pub final_tracking_error_mean: f64,
    pub final_tracking_error_max: f64,
}

/// Bound checks over the complete replications (online Newton only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub evaluated: usize,
    pub checklist_passed: usize,
    pub theorem1_bound_mean: Option<f64>,
    pub theorem1_violations: usize,
    pub corollary1_applicable: usize,
    pub corollary1_bound_mean: Option<f64>,
    pub corollary1_violations: usize,
    /// Replications in which each assumption failed.
    pub assumption_failures: BTreeMap<String, usize>,
    /// Checklist and constants of the first complete replication.
    pub checklist: Option<AssumptionChecklist>,
    pub constants: Option<RegularityConstants>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// In replication order.
    pub replications: Vec<Result<ReplicationResult, ReplicationError>>,
    pub completed: usize,
    /// Set up but stopped early by some algorithm.
    pub partial: usize,
    pub failed: usize,
    pub curves: BTreeMap<AlgorithmKind, CurveStats>,
    pub summaries: Vec<AlgorithmSummary>,
    pub bounds: BoundSummary,
}

impl ExperimentReport {
    pub fn complete(&self) -> impl Iterator<Item = &ReplicationResult> {
        self.replications.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.is_complete())
    }

    pub fn summary(&self, kind: AlgorithmKind) -> Option<&AlgorithmSummary> {
        self.summaries.iter().find(|s| s.algorithm == kind)
    }
}

/// Runs every replication and reduces them in replication order.
///
/// Partial and failed replications are counted but excluded from the
/// curves and summaries.
pub fn run_experiment(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentReport, ConfigError> {
    config.validate()?;
    let replications = run_all(config, execution);

    let failed = replications.iter().filter(|r| r.is_err()).count();
    let complete: Vec<&ReplicationResult> =
        replications.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.is_complete()).collect();
    let partial = replications.len() - failed - complete.len();

    let mut curves = BTreeMap::new();
    let mut summaries = Vec::new();
    for &kind in &config.algorithms {
        let ledgers: Vec<_> = complete.iter().filter_map(|r| r.run(kind)).map(|r| &r.ledger).collect();
        let cumulative: Vec<Vec<f64>> = ledgers.iter().map(|l| l.cumulative_regret()).collect();
        curves.insert(kind, curve_stats(&cumulative, config.horizon + 1));
        let finals: Vec<f64> = ledgers.iter().map(|l| l.regret).collect();
        let (final_regret_mean, final_regret_stderr) = mean_stderr(&finals);
        let tracking: Vec<f64> =
            ledgers.iter().filter_map(|l| l.records.last().and_then(|r| r.tracking_error())).collect();
        summaries.push(AlgorithmSummary {
            algorithm: kind,
            replications: ledgers.len(),
            final_regret_mean,
            final_regret_stderr,
            total_variation_mean: mean_stderr(&ledgers.iter().map(|l| l.total_variation).collect::<Vec<_>>()).0,
            error_sum_mean: mean_stderr(&ledgers.iter().map(|l| l.error_sum).collect::<Vec<_>>()).0,
            final_tracking_error_mean: mean_stderr(&tracking).0,
            final_tracking_error_max: tracking.iter().copied().fold(0.0, f64::max),
        });
    }

    let bounds = bound_summary(&complete);
    Ok(ExperimentReport {
        config: config.clone(),
        completed: complete.len(),
        partial,
        failed,
        curves,
        summaries,
        bounds,
        replications,
    })
}

fn run_all(config: &ExperimentConfig, execution: Execution) -> Vec<Result<ReplicationResult, ReplicationError>> {
    match execution {
        Execution::Serial => (0..config.replications).map(|i| run_replication(config, i)).collect(),
        Execution::Parallel { threads } => run_parallel(config, threads),
    }
}

#[cfg(feature = "parallel")]
fn run_parallel(config: &ExperimentConfig, threads: usize) -> Vec<Result<ReplicationResult, ReplicationError>> {
    use rayon::prelude::*;
    let work = || (0..config.replications).into_par_iter().map(|i| run_replication(config, i)).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel(config: &ExperimentConfig, _threads: usize) -> Vec<Result<ReplicationResult, ReplicationError>> {
    run_all(config, Execution::Serial)
}

fn bound_summary(complete: &[&ReplicationResult]) -> BoundSummary {
    let mut s = BoundSummary {
        evaluated: 0,
        checklist_passed: 0,
        theorem1_bound_mean: None,
        theorem1_violations: 0,
        corollary1_applicable: 0,
        corollary1_bound_mean: None,
        corollary1_violations: 0,
        assumption_failures: BTreeMap::new(),
        checklist: None,
        constants: None,
    };
    let mut theorem_values = Vec::new();
    let mut corollary_values = Vec::new();
    for rep in complete {
        let (Some(run), Some(k)) = (rep.run(AlgorithmKind::Onm), rep.constants.as_ref()) else {
            continue;
        };
        let ledger = &run.ledger;
        let Some(checklist) = ledger.checklist.as_ref() else {
            continue;
        };
        s.evaluated += 1;
        if s.checklist.is_none() {
            s.checklist = Some(checklist.clone());
            s.constants = Some(k.clone());
        }
        for c in checklist.failing() {
            *s.assumption_failures.entry(c.assumption.to_string()).or_insert(0) += 1;
        }
        if !checklist.all_hold() {
            continue;
        }
        s.checklist_passed += 1;
        if let Some(bound) = ledger.theorem1_bound {
            theorem_values.push(bound);
            if ledger.regret > bound + BOUND_SLACK {
                s.theorem1_violations += 1;
            }
        }
        if let Ok(cor) = corollary1_bound(k, ledger.initial_error()) {
            s.corollary1_applicable += 1;
            corollary_values.push(cor.value);
            let prefix_ok = ledger.prefix_error_sums().iter().all(|&e| e <= cor.e_lower + BOUND_SLACK);
            if ledger.regret > cor.value + BOUND_SLACK || !prefix_ok {
                s.corollary1_violations += 1;
            }
        }
    }
    s.theorem1_bound_mean = (!theorem_values.is_empty()).then(|| mean_stderr(&theorem_values).0);
    s.corollary1_bound_mean = (!corollary_values.is_empty()).then(|| mean_stderr(&corollary_values).0);
    s
}

fn curve_stats(series: &[Vec<f64>], rounds: usize) -> CurveStats {
    let mut mean = Vec::with_capacity(rounds);
    let mut stderr = Vec::with_capacity(rounds);
    let mut column = Vec::with_capacity(series.len());
    for t in 0..rounds {
        column.clear();
        column.extend(series.iter().map(|s| s[t]));
        let (m, e) = mean_stderr(&column);
        mean.push(m);
        stderr.push(e);
    }
    CurveStats { mean, stderr }
}

/// Mean and standard error (sample deviation over `sqrt(n)`), summed in
/// order. NaN for an empty sample; zero error for a single value.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr() {
        assert_eq!(mean_stderr(&[2.0]), (2.0, 0.0));
        let (m, e) = mean_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        // sample sd sqrt(2), over sqrt(2)
        assert!((e - 1.0).abs() < 1e-15);
        assert!(mean_stderr(&[]).0.is_nan());
    }
}
