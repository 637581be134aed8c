//! Regularity constants governing the Newton basin and the regret bounds,
//! and their sampling-based estimation.
//!
//! The estimates are data-driven, not certificates: `h` is exact at the
//! supplied optima, while `L` and `ell` are maxima over finitely many
//! sampled points and can only under-estimate the true moduli.

use serde::Serialize;
use thiserror::Error;

use super::{LossOracle, OracleError};
use crate::linalg::{min_singular_value, operator_norm, Vector};
use crate::random::{point_in_ball, stream};

pub const MIN_SAMPLES: usize = 100;
/// Gradient norm above which a supplied optimum is rejected as non-stationary.
pub const STATIONARITY_TOLERANCE: f64 = 1e-8;
/// Smallest Hessian singular value accepted at an optimum.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

const HESSIAN_SAMPLER_SEED: u64 = 0x4c49_5053_4348_4954;
const VALUE_SAMPLER_SEED: u64 = 0x4c49_5053_5641_4c55;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("Hessian at the round-{round} optimum has smallest singular value {min_singular_value:e}")]
    DegenerateOptimum { round: usize, min_singular_value: f64 },
    #[error("round-{round} optimum is not stationary: gradient norm {gradient_norm:e}")]
    NotStationary { round: usize, gradient_norm: f64 },
    #[error("invalid constant {name} = {value}")]
    Invalid { name: &'static str, value: f64 },
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationInfo {
    pub radius: f64,
    pub samples_per_round: usize,
    pub rounds: usize,
    /// Round at which the smallest optimum singular value was found.
    pub h_round: usize,
}

/// `h`, `L`, `beta`, `ell`, `gamma`, `v_bar` and `V_bar`.
///
/// `gamma = min(beta, 2h / 3L)` always holds; when `L = 0` (constant
/// Hessian) the second term is infinite and `gamma = beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityConstants {
    h: f64,
    hessian_lipschitz: f64,
    beta: f64,
    value_lipschitz: f64,
    gamma: f64,
    max_step_variation: f64,
    max_total_variation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimation: Option<EstimationInfo>,
}

impl RegularityConstants {
    pub fn new(
        h: f64,
        hessian_lipschitz: f64,
        beta: f64,
        value_lipschitz: f64,
        max_step_variation: f64,
        max_total_variation: f64,
    ) -> Result<Self, ConstantsError> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ConstantsError::Invalid { name, value })
            }
        };
        let nonneg = |name, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(ConstantsError::Invalid { name, value })
            }
        };
        positive("h", h)?;
        nonneg("L", hessian_lipschitz)?;
        positive("beta", beta)?;
        nonneg("ell", value_lipschitz)?;
        nonneg("v_bar", max_step_variation)?;
        nonneg("V_bar", max_total_variation)?;
        let gamma = beta.min(basin_limit(h, hessian_lipschitz));
        Ok(RegularityConstants {
            h,
            hessian_lipschitz,
            beta,
            value_lipschitz,
            gamma,
            max_step_variation,
            max_total_variation,
            estimation: None,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `L`
    pub fn hessian_lipschitz(&self) -> f64 {
        self.hessian_lipschitz
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ell`
    pub fn value_lipschitz(&self) -> f64 {
        self.value_lipschitz
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `v_bar`
    pub fn max_step_variation(&self) -> f64 {
        self.max_step_variation
    }

    /// `V_bar`
    pub fn max_total_variation(&self) -> f64 {
        self.max_total_variation
    }

    pub fn estimation(&self) -> Option<&EstimationInfo> {
        self.estimation.as_ref()
    }

    /// `3L / 2h`, the quadratic contraction coefficient of the Newton step.
    pub fn contraction(&self) -> f64 {
        1.5 * self.hessian_lipschitz / self.h
    }

    /// `2h / 3L`, infinite when `L = 0`.
    pub fn basin_limit(&self) -> f64 {
        basin_limit(self.h, self.hessian_lipschitz)
    }

    /// `gamma - (3L/2h) gamma^2`: the largest per-round motion that keeps the
    /// iterate inside the basin.
    pub fn motion_allowance(&self) -> f64 {
        self.gamma - self.contraction() * self.gamma * self.gamma
    }

    /// Shrinks the Lipschitz radius to `beta` (which must not exceed the
    /// current one) and recomputes `gamma`. `L` and `ell` measured on the
    /// larger ball remain valid on the smaller one.
    pub fn with_beta(&self, beta: f64) -> Result<Self, ConstantsError> {
        if !(beta > 0.0 && beta <= self.beta) {
            return Err(ConstantsError::Invalid { name: "beta", value: beta });
        }
        let mut out = self.clone();
        out.beta = beta;
        out.gamma = beta.min(self.basin_limit());
        Ok(out)
    }

    pub fn with_variation(&self, max_step_variation: f64, max_total_variation: f64) -> Result<Self, ConstantsError> {
        let mut out = Self::new(
            self.h,
            self.hessian_lipschitz,
            self.beta,
            self.value_lipschitz,
            max_step_variation,
            max_total_variation,
        )?;
        out.estimation = self.estimation.clone();
        Ok(out)
    }
}

fn basin_limit(h: f64, lipschitz: f64) -> f64 {
    if lipschitz == 0.0 {
        f64::INFINITY
    } else {
        2.0 * h / (3.0 * lipschitz)
    }
}

/// Estimates the regularity constants of `oracle` around the round optima.
///
/// * `h` is the smallest Hessian singular value over all supplied optima.
/// * `L` is the largest ratio `||H_t(x) - H_t(x_t*)|| / ||x - x_t*||` over
///   `samples` points drawn uniformly from the `radius`-ball around each
///   optimum; `beta = radius`.
/// * `ell` is the largest ratio `|f_t(x) - f_t(x_t*)| / ||x - x_t*||` over
///   `samples` points drawn from the `gamma`-ball.
/// * `v_bar` and `V_bar` are the largest and total optimum displacement.
///
/// The sample points come from fixed per-round streams, so the first `k`
/// samples are the same whatever `samples` is.
pub fn estimate_constants<O: LossOracle + ?Sized>(
    oracle: &O,
    optima: &[Vector],
    radius: f64,
    samples: usize,
) -> Result<RegularityConstants, ConstantsError> {
    if optima.is_empty() {
        return Err(ConstantsError::BadRequest("no optima supplied".into()));
    }
    if optima.len() > oracle.rounds() {
        return Err(ConstantsError::BadRequest(format!(
            "{} optima for an oracle with {} rounds",
            optima.len(),
            oracle.rounds()
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(ConstantsError::Invalid { name: "radius", value: radius });
    }
    if samples < MIN_SAMPLES {
        return Err(ConstantsError::BadRequest(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }

    let mut h = f64::INFINITY;
    let mut h_round = 0;
    let mut hessians = Vec::with_capacity(optima.len());
    for (t, x_star) in optima.iter().enumerate() {
        let eval = oracle.evaluate(t, x_star)?;
        let gradient_norm = eval.gradient.norm();
        if !(gradient_norm <= STATIONARITY_TOLERANCE) {
            return Err(ConstantsError::NotStationary { round: t, gradient_norm });
        }
        let sigma = min_singular_value(&eval.hessian);
        if sigma <= DEGENERACY_THRESHOLD {
            return Err(ConstantsError::DegenerateOptimum { round: t, min_singular_value: sigma });
        }
        if sigma < h {
            h = sigma;
            h_round = t;
        }
        hessians.push((eval.value, eval.hessian));
    }

    let mut lipschitz: f64 = 0.0;
    for (t, (x_star, (_, h_star))) in optima.iter().zip(&hessians).enumerate() {
        let mut rng = stream(HESSIAN_SAMPLER_SEED, t as u64);
        for _ in 0..samples {
            let (x, rho) = point_in_ball(&mut rng, x_star, radius);
            let ratio = operator_norm(&oracle.hessian(t, &x)?.sub(h_star)) / rho;
            lipschitz = lipschitz.max(ratio);
        }
    }

    let gamma = radius.min(basin_limit(h, lipschitz));
    let mut value_lipschitz: f64 = 0.0;
    for (t, (x_star, (f_star, _))) in optima.iter().zip(&hessians).enumerate() {
        let mut rng = stream(VALUE_SAMPLER_SEED, t as u64);
        for _ in 0..samples {
            let (x, rho) = point_in_ball(&mut rng, x_star, gamma);
            let ratio = (oracle.value(t, &x)? - f_star).abs() / rho;
            value_lipschitz = value_lipschitz.max(ratio);
        }
    }

    let steps: Vec<f64> = optima.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let v_bar = steps.iter().copied().fold(0.0, f64::max);
    let total: f64 = steps.iter().sum();

    let mut k = RegularityConstants::new(h, lipschitz, radius, value_lipschitz, v_bar, total)?;
    k.estimation = Some(EstimationInfo { radius, samples_per_round: samples, rounds: optima.len(), h_round });
    Ok(k)
}
