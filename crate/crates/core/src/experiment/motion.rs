use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::Vector;
use crate::oracle::SensorArray;
use crate::random::Stream;

/// Target motion `x_{t+1}* = x_t* + v_t` along the all-ones direction with
/// a random sign `(-1)^{b_t}`, `b_t ~ Bernoulli(1/2)` drawn each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionModel {
    /// `||v_t|| = amplitude / sqrt(t)`.
    GeneralVariation {
        amplitude: f64,
        /// Fixes every `b_t` to this bit instead of drawing it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frozen_bit: Option<u8>,
    },
    /// `||v_t|| = 6 amplitude / (pi^2 t^2)`, so the total motion stays
    /// below `amplitude` for every horizon.
    LimitedVariation {
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frozen_bit: Option<u8>,
    },
    /// Explicit displacements `v_1, v_2, ...`.
    Custom { displacements: Vec<Vector> },
}

impl MotionModel {
    pub fn validate(&self, dim: usize, horizon: usize) -> Result<(), String> {
        match self {
            MotionModel::GeneralVariation { amplitude, frozen_bit }
            | MotionModel::LimitedVariation { amplitude, frozen_bit } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(format!("motion amplitude must be finite and non-negative, got {amplitude}"));
                }
                if matches!(frozen_bit, Some(b) if *b > 1) {
                    return Err("motion frozen_bit must be 0 or 1".into());
                }
                Ok(())
            }
            MotionModel::Custom { displacements } => {
                if displacements.len() < horizon {
                    return Err(format!("custom motion has {} displacements for horizon {horizon}", displacements.len()));
                }
                if let Some(d) = displacements.iter().find(|d| d.len() != dim) {
                    return Err(format!("custom displacement has dimension {}, expected {dim}", d.len()));
                }
                Ok(())
            }
        }
    }

    /// Norm of the signed displacement at round `t >= 1` (custom: the given one).
    pub fn step_norm(&self, t: usize) -> f64 {
        let t = t as f64;
        match self {
            MotionModel::GeneralVariation { amplitude, .. } => amplitude / t.sqrt(),
            MotionModel::LimitedVariation { amplitude, .. } => {
                6.0 * amplitude / (std::f64::consts::PI.powi(2) * t * t)
            }
            MotionModel::Custom { displacements } => displacements[t as usize - 1].norm(),
        }
    }

    fn displacement(&self, t: usize, dim: usize, rng: &mut Stream) -> Vector {
        let frozen = match self {
            MotionModel::Custom { displacements } => return displacements[t - 1].clone(),
            MotionModel::GeneralVariation { frozen_bit, .. } | MotionModel::LimitedVariation { frozen_bit, .. } => {
                *frozen_bit
            }
        };
        let bit = frozen.map_or_else(|| rng.random::<bool>(), |b| b == 1);
        let sign = if bit { -1.0 } else { 1.0 };
        let per_axis = sign * self.step_norm(t) / (dim as f64).sqrt();
        Vector::from_vec_unchecked(vec![per_axis; dim])
    }
}

/// `T + 1` target positions starting at `x0_star`.
pub fn generate_target_path(motion: &MotionModel, x0_star: &Vector, horizon: usize, rng: &mut Stream) -> Vec<Vector> {
    let mut path = Vec::with_capacity(horizon + 1);
    path.push(x0_star.clone());
    for t in 1..=horizon {
        let next = &path[t - 1] + &motion.displacement(t, x0_star.len(), rng);
        path.push(next);
    }
    path
}

/// Ranges `||x_star - a_i|| + w_i` with `w_i ~ N(0, sigma_w^2)`.
pub fn generate_measurements(x_star: &Vector, sensors: &SensorArray, sigma_w: f64, rng: &mut Stream) -> Vec<f64> {
    sensors
        .ranges(x_star)
        .into_iter()
        .map(|d| {
            let w: f64 = StandardNormal.sample(rng);
            d + sigma_w * w
        })
        .collect()
}
