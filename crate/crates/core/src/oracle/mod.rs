//! Per-round loss oracles and the numerical machinery built on them:
//! finite-difference checks, regularity-constant estimation and the
//! brute-force round optimum.

mod affine;
mod constants;
mod derivatives;
mod localization;
mod optimum;
mod quadratic;
mod ripple;

pub use affine::AffineComposition;
pub use constants::{estimate_constants, ConstantsError, EstimationInfo, RegularityConstants, MIN_SAMPLES};
pub use derivatives::{check_derivatives, DerivativeError, DerivativeKind, DerivativeReport};
pub use localization::{localization_loss, localization_value, LocalizationLoss, SensorArray};
pub use optimum::{brute_force_optimum, OptimumError, OptimumMode, SearchBox, MIN_GRID};
pub use quadratic::{quadratic_loss, QuadraticLoss};
pub use ripple::RippleLoss;

use thiserror::Error;

use crate::linalg::{SymMatrix, Vector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("point is within {distance:e} of sensor {sensor}; the range loss is not differentiable there")]
    SensorCoincidence { sensor: usize, distance: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("round {round} out of range (oracle has {rounds} rounds)")]
    RoundOutOfRange { round: usize, rounds: usize },
}

/// Value, gradient and Hessian of a loss at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Vector,
    pub hessian: SymMatrix,
}

/// A sequence of twice-differentiable losses `f_0, ..., f_{T-1}` on `R^n`.
///
/// Implementations are immutable and shared across threads.
pub trait LossOracle: Sync {
    fn dim(&self) -> usize;

    /// Number of rounds the oracle can serve.
    fn rounds(&self) -> usize;

    fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError>;

    fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError>;

    fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError>;

    fn evaluate(&self, t: usize, x: &Vector) -> Result<Evaluation, OracleError> {
        Ok(Evaluation { value: self.value(t, x)?, gradient: self.gradient(t, x)?, hessian: self.hessian(t, x)? })
    }
}

impl<T: LossOracle + ?Sized> LossOracle for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn rounds(&self) -> usize {
        (**self).rounds()
    }
    fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError> {
        (**self).value(t, x)
    }
    fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
        (**self).gradient(t, x)
    }
    fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError> {
        (**self).hessian(t, x)
    }
    fn evaluate(&self, t: usize, x: &Vector) -> Result<Evaluation, OracleError> {
        (**self).evaluate(t, x)
    }
}

pub(crate) fn check_point(dim: usize, rounds: usize, t: usize, x: &Vector) -> Result<(), OracleError> {
    if t >= rounds {
        return Err(OracleError::RoundOutOfRange { round: t, rounds });
    }
    if x.len() != dim {
        return Err(OracleError::DimensionMismatch { expected: dim, found: x.len() });
    }
    Ok(())
}
