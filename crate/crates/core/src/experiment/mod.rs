//! Moving-target localization benchmark: target motion, noisy ranges,
//! paired Monte Carlo replications and their aggregation.

mod aggregate;
mod motion;
mod replication;

pub use aggregate::{run_experiment, AlgorithmSummary, BoundSummary, CurveStats, Execution, ExperimentReport};
pub use motion::{generate_measurements, generate_target_path, MotionModel};
pub use replication::{run_replication, AlgorithmRun, ReplicationError, ReplicationResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{Algorithm, OgdConfig};
use crate::linalg::Vector;
use crate::oracle::SensorArray;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Onm,
    Ogd,
}

impl AlgorithmKind {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::Onm => "onm",
            AlgorithmKind::Ogd => "ogd",
        }
    }
}

/// How the basin radius used for the bounds is chosen from the estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaPolicy {
    /// `gamma = min(radius, h / 3L)`.
    HOver3l,
    /// `gamma = min(radius, 2h / 3L)`.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSettings {
    /// Radius of the sampling ball for the Hessian Lipschitz constant.
    pub radius: f64,
    pub samples: usize,
}

impl Default for EstimationSettings {
    fn default() -> Self {
        EstimationSettings { radius: 0.5, samples: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimumSettings {
    /// Half-width of the search square centered on the true target.
    pub half_width: f64,
    pub grid: usize,
}

impl Default for OptimumSettings {
    fn default() -> Self {
        OptimumSettings { half_width: 1.0, grid: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub sensors: SensorArray,
    /// Initial target position, known to the learners.
    pub x0_star: Vector,
    /// Number of target moves `T`; the run has `T + 1` rounds.
    pub horizon: usize,
    /// Standard deviation of the additive range noise.
    pub sigma_w: f64,
    pub motion: MotionModel,
    pub replications: usize,
    pub master_seed: u64,
    pub algorithms: Vec<AlgorithmKind>,
    #[serde(default = "default_gamma_policy")]
    pub gamma_policy: GammaPolicy,
    /// Initial decision; defaults to `x0_star`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vector>,
    /// Gradient step; defaults to `1 / sqrt(horizon)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ogd_eta: Option<f64>,
    #[serde(default)]
    pub estimation: EstimationSettings,
    #[serde(default)]
    pub optimum: OptimumSettings,
    /// Replications whose trajectories are kept for output.
    #[serde(default = "default_trajectory_replications")]
    pub trajectory_replications: usize,
}

fn default_gamma_policy() -> GammaPolicy {
    GammaPolicy::HOver3l
}

fn default_trajectory_replications() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        let n = self.sensors.dim();
        if self.x0_star.len() != n {
            return fail(format!("x0_star has dimension {}, sensors have {n}", self.x0_star.len()));
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != n {
                return fail(format!("x0 has dimension {}, sensors have {n}", x0.len()));
            }
        }
        if self.horizon < 1 {
            return fail("horizon must be at least 1".into());
        }
        if self.replications < 1 {
            return fail("replications must be at least 1".into());
        }
        if !(self.sigma_w.is_finite() && self.sigma_w >= 0.0) {
            return fail(format!("sigma_w must be finite and non-negative, got {}", self.sigma_w));
        }
        if self.algorithms.is_empty() {
            return fail("algorithms must not be empty".into());
        }
        if let Some(eta) = self.ogd_eta {
            if OgdConfig::new(eta).is_none() {
                return fail(format!("ogd_eta must be positive, got {eta}"));
            }
        }
        let est = &self.estimation;
        if !(est.radius.is_finite() && est.radius > 0.0) {
            return fail(format!("estimation.radius must be positive, got {}", est.radius));
        }
        if est.samples < crate::oracle::MIN_SAMPLES {
            return fail(format!("estimation.samples must be at least {}", crate::oracle::MIN_SAMPLES));
        }
        let opt = &self.optimum;
        if !(opt.half_width.is_finite() && opt.half_width > 0.0) {
            return fail(format!("optimum.half_width must be positive, got {}", opt.half_width));
        }
        if opt.grid < crate::oracle::MIN_GRID {
            return fail(format!("optimum.grid must be at least {}", crate::oracle::MIN_GRID));
        }
        self.motion.validate(n, self.horizon).map_err(ConfigError::Invalid)
    }

    pub fn initial_decision(&self) -> Vector {
        self.x0.clone().unwrap_or_else(|| self.x0_star.clone())
    }

    pub fn algorithm(&self, kind: AlgorithmKind) -> Algorithm {
        match kind {
            AlgorithmKind::Onm => Algorithm::Onm,
            AlgorithmKind::Ogd => Algorithm::Ogd(
                self.ogd_eta.and_then(OgdConfig::new).unwrap_or_else(|| OgdConfig::for_horizon(self.horizon)),
            ),
        }
    }
}
