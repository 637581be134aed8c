use thiserror::Error;

use super::{generate_measurements, generate_target_path, AlgorithmKind, ExperimentConfig, GammaPolicy};
use crate::algorithms::{run_online, StepError};
use crate::analysis::RegretLedger;
use crate::linalg::Vector;
use crate::oracle::{
    brute_force_optimum, estimate_constants, ConstantsError, LocalizationLoss, OptimumError, OptimumMode,
    OracleError, RegularityConstants, SearchBox,
};
use crate::random::stream;

/// A replication that could not be set up.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplicationError {
    #[error("replication {index}: {source}")]
    Oracle { index: usize, source: OracleError },
    #[error("replication {index}: round {round} optimum: {source}")]
    Optimum { index: usize, round: usize, source: OptimumError },
}

/// One algorithm's run inside a replication.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: AlgorithmKind,
    pub ledger: RegretLedger,
    pub failure: Option<StepError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub index: usize,
    /// Stream id within the master seed.
    pub stream: u64,
    pub targets: Vec<Vector>,
    pub optima: Vec<Vector>,
    pub constants: Option<RegularityConstants>,
    pub constants_error: Option<ConstantsError>,
    pub runs: Vec<AlgorithmRun>,
}

impl ReplicationResult {
    /// Every algorithm ran all rounds.
    pub fn is_complete(&self) -> bool {
        self.runs.iter().all(|r| r.failure.is_none())
    }

    pub fn run(&self, kind: AlgorithmKind) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == kind)
    }
}

/// Runs replication `index` of `config`.
///
/// The target path and then all range noise come from the replication's own
/// stream, so every algorithm faces the same losses. Each round's optimum is
/// found by grid search in a square around the true target.
pub fn run_replication(config: &ExperimentConfig, index: usize) -> Result<ReplicationResult, ReplicationError> {
    let stream_id = index as u64;
    let mut rng = stream(config.master_seed, stream_id);
    let targets = generate_target_path(&config.motion, &config.x0_star, config.horizon, &mut rng);
    let measurements = targets
        .iter()
        .map(|p| generate_measurements(p, &config.sensors, config.sigma_w, &mut rng))
        .collect();
    let oracle = LocalizationLoss::new(config.sensors.clone(), measurements)
        .map_err(|source| ReplicationError::Oracle { index, source })?;

    let optima = targets
        .iter()
        .enumerate()
        .map(|(round, target)| {
            let bounds = SearchBox::centered(target, config.optimum.half_width)
                .and_then(|b| brute_force_optimum(&oracle, round, &b, config.optimum.grid, &OptimumMode::Minimize));
            bounds.map_err(|source| ReplicationError::Optimum { index, round, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (constants, constants_error) = match estimate(config, &oracle, &optima) {
        Ok(k) => (Some(k), None),
        Err(e) => (None, Some(e)),
    };

    let runs = config
        .algorithms
        .iter()
        .map(|&kind| {
            let run = run_online(&oracle, &optima, config.initial_decision(), &config.algorithm(kind), Some(&targets));
            let mut ledger = RegretLedger::new(run.records);
            if let (AlgorithmKind::Onm, Some(k), None) = (kind, &constants, &run.failure) {
                ledger.evaluate_bounds(k);
            }
            AlgorithmRun { algorithm: kind, ledger, failure: run.failure }
        })
        .collect();

    Ok(ReplicationResult { index, stream: stream_id, targets, optima, constants, constants_error, runs })
}

fn estimate(
    config: &ExperimentConfig,
    oracle: &LocalizationLoss,
    optima: &[Vector],
) -> Result<RegularityConstants, ConstantsError> {
    let est = &config.estimation;
    let k = estimate_constants(oracle, optima, est.radius, est.samples)?;
    match config.gamma_policy {
        GammaPolicy::Estimated => Ok(k),
        GammaPolicy::HOver3l => k.with_beta(k.beta().min(k.basin_limit() / 2.0)),
    }
}
