use serde::{Deserialize, Serialize};

use super::StepError;
use crate::linalg::Vector;
use crate::oracle::LossOracle;

/// Fixed step size of the gradient-descent baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OgdConfig {
    pub eta: f64,
}

impl OgdConfig {
    pub fn new(eta: f64) -> Option<Self> {
        (eta.is_finite() && eta > 0.0).then_some(OgdConfig { eta })
    }

    /// `eta = 1 / sqrt(horizon)`.
    pub fn for_horizon(horizon: usize) -> Self {
        OgdConfig { eta: 1.0 / (horizon.max(1) as f64).sqrt() }
    }
}

/// Unprojected online gradient step `x - eta * grad f_t(x)`.
pub fn ogd_step<O: LossOracle + ?Sized>(
    oracle: &O,
    x: &Vector,
    t: usize,
    config: &OgdConfig,
) -> Result<Vector, StepError> {
    let g = oracle.gradient(t, x).map_err(|source| StepError::Oracle { round: t, source })?;
    Ok(x.axpy(-config.eta, &g))
}
