//! Online update rules: the online Newton step, the gradient-descent
//! baseline, the scalar quadratic map that governs the Newton error
//! recursion, and the play-then-observe driver.

mod gradient;
mod newton;
mod online;
mod quadratic_map;

pub use gradient::{ogd_step, OgdConfig};
pub use newton::{onm_step, OnmState};
pub use online::{run_online, Algorithm, OnlineRun};
pub use quadratic_map::{
    quadratic_map_converge, quadratic_map_fixed_points, quadratic_map_iterate, Convergence, QuadraticMapError,
    QuadraticMapParams, MAP_MAX_STEPS, MAP_STEP_TOLERANCE,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::oracle::OracleError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("Hessian is singular at round {round}: {source}")]
    SingularHessian { round: usize, source: LinalgError },
    #[error("oracle failed at round {round}: {source}")]
    Oracle { round: usize, source: OracleError },
}

impl StepError {
    pub fn round(&self) -> usize {
        match self {
            StepError::SingularHessian { round, .. } | StepError::Oracle { round, .. } => *round,
        }
    }
}
