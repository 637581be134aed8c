//! Central finite-difference validation of oracle gradients and Hessians.

use serde::Serialize;
use thiserror::Error;

use super::{LossOracle, OracleError};
use crate::linalg::{operator_norm, Vector};

/// Step for differencing values (scaled by `max(1, |x_i|)`).
pub const VALUE_STEP: f64 = 1e-6;
/// Step for differencing gradients (scaled by `max(1, |x_i|)`).
pub const GRADIENT_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeKind {
    Gradient,
    Hessian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub gradient_deviation: f64,
    pub gradient_tolerance: f64,
    pub hessian_deviation: f64,
    pub hessian_tolerance: f64,
    pub value_step: f64,
    pub gradient_step: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DerivativeError {
    #[error(
        "{kind:?} mismatch at ({row}, {col}): analytic {analytic:e} vs finite difference {numeric:e} (tolerance {tolerance:e})"
    )]
    Mismatch { kind: DerivativeKind, row: usize, col: usize, analytic: f64, numeric: f64, tolerance: f64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Compares the oracle's gradient and Hessian at `(t, x)` with central
/// differences of its value and gradient.
///
/// Gradient entries must match within `max(1e-6, 1e-6 ||grad||)`, Hessian
/// entries within `max(1e-4, 1e-4 ||H||)`. For the gradient the reported
/// `col` is always 0.
pub fn check_derivatives<O: LossOracle + ?Sized>(
    oracle: &O,
    t: usize,
    x: &Vector,
) -> Result<DerivativeReport, DerivativeError> {
    let eval = oracle.evaluate(t, x)?;
    let n = x.len();

    let gradient_tolerance = 1e-6_f64.max(1e-6 * eval.gradient.norm());
    let hessian_tolerance = 1e-4_f64.max(1e-4 * operator_norm(&eval.hessian));

    let mut worst_gradient: (f64, usize, f64) = (0.0, 0, 0.0);
    let mut worst_hessian: (f64, usize, usize, f64) = (0.0, 0, 0, 0.0);

    for j in 0..n {
        let step = VALUE_STEP * x[j].abs().max(1.0);
        let (plus, minus) = shifted(x, j, step);
        let numeric = (oracle.value(t, &plus)? - oracle.value(t, &minus)?) / (plus[j] - minus[j]);
        let dev = (numeric - eval.gradient[j]).abs();
        if !(dev <= worst_gradient.0) {
            worst_gradient = (dev, j, numeric);
        }

        let step = GRADIENT_STEP * x[j].abs().max(1.0);
        let (plus, minus) = shifted(x, j, step);
        let gp = oracle.gradient(t, &plus)?;
        let gm = oracle.gradient(t, &minus)?;
        let width = plus[j] - minus[j];
        for i in 0..n {
            let numeric = (gp[i] - gm[i]) / width;
            let dev = (numeric - eval.hessian.get(i, j)).abs();
            if !(dev <= worst_hessian.0) {
                worst_hessian = (dev, i, j, numeric);
            }
        }
    }

    if !(worst_gradient.0 <= gradient_tolerance) {
        let (_, row, numeric) = worst_gradient;
        return Err(DerivativeError::Mismatch {
            kind: DerivativeKind::Gradient,
            row,
            col: 0,
            analytic: eval.gradient[row],
            numeric,
            tolerance: gradient_tolerance,
        });
    }
    if !(worst_hessian.0 <= hessian_tolerance) {
        let (_, row, col, numeric) = worst_hessian;
        return Err(DerivativeError::Mismatch {
            kind: DerivativeKind::Hessian,
            row,
            col,
            analytic: eval.hessian.get(row, col),
            numeric,
            tolerance: hessian_tolerance,
        });
    }

    Ok(DerivativeReport {
        gradient_deviation: worst_gradient.0,
        gradient_tolerance,
        hessian_deviation: worst_hessian.0,
        hessian_tolerance,
        value_step: VALUE_STEP,
        gradient_step: GRADIENT_STEP,
    })
}

fn shifted(x: &Vector, j: usize, step: f64) -> (Vector, Vector) {
    let mut plus = x.clone();
    let mut minus = x.clone();
    plus[j] += step;
    minus[j] -= step;
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::oracle::{LocalizationLoss, QuadraticLoss, SensorArray};

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn quadratic_passes_tightly() {
        let q = QuadraticLoss::single(SymMatrix::diagonal(&[2.0, 4.0]).unwrap(), v(&[2.0, 4.0])).unwrap();
        let report = check_derivatives(&q, 0, &v(&[1.0, 2.0])).unwrap();
        assert!(report.gradient_deviation <= 1e-9, "{report:?}");
        assert_eq!(report.value_step, 1e-6);
    }

    #[test]
    fn single_sensor_localization_passes() {
        let sensors = SensorArray::new(vec![v(&[0.0, 0.0])]).unwrap();
        let loss = LocalizationLoss::new(sensors, vec![vec![1.0]]).unwrap();
        let report = check_derivatives(&loss, 0, &v(&[2.0, 0.0])).unwrap();
        assert!(report.gradient_deviation < 1e-8);
        assert!(report.hessian_deviation < 1e-8);
    }

    struct FlippedGradient(QuadraticLoss);

    impl LossOracle for FlippedGradient {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn rounds(&self) -> usize {
            self.0.rounds()
        }
        fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError> {
            self.0.value(t, x)
        }
        fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
            Ok(-&self.0.gradient(t, x)?)
        }
        fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError> {
            self.0.hessian(t, x)
        }
    }

    #[test]
    fn wrong_gradient_sign_is_reported() {
        let q = QuadraticLoss::single(SymMatrix::diagonal(&[2.0, 4.0]).unwrap(), v(&[2.0, 4.0])).unwrap();
        let err = check_derivatives(&FlippedGradient(q), 0, &v(&[1.0, 2.0])).unwrap_err();
        match err {
            DerivativeError::Mismatch { kind: DerivativeKind::Gradient, row, .. } => assert!(row < 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
