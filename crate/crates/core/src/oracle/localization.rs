use serde::{Deserialize, Serialize};

use super::{check_point, Evaluation, LossOracle, OracleError};
use crate::linalg::{SymMatrix, Vector};

/// Minimum distance from a sensor at which the range loss is treated as
/// differentiable.
pub const SENSOR_CLEARANCE: f64 = 1e-9;

/// Fixed sensor positions `a_1, ..., a_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct SensorArray {
    positions: Vec<Vector>,
}

impl SensorArray {
    pub fn new(positions: Vec<Vector>) -> Result<Self, OracleError> {
        let Some(first) = positions.first() else {
            return Err(OracleError::DimensionMismatch { expected: 1, found: 0 });
        };
        let dim = first.len();
        if let Some(bad) = positions.iter().find(|p| p.len() != dim) {
            return Err(OracleError::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(SensorArray { positions })
    }

    pub fn positions(&self) -> &[Vector] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    /// Exact ranges `||x - a_i||`.
    pub fn ranges(&self, x: &Vector) -> Vec<f64> {
        self.positions.iter().map(|a| x.distance(a)).collect()
    }
}

impl TryFrom<Vec<Vector>> for SensorArray {
    type Error = OracleError;

    fn try_from(positions: Vec<Vector>) -> Result<Self, Self::Error> {
        SensorArray::new(positions)
    }
}

impl From<SensorArray> for Vec<Vector> {
    fn from(s: SensorArray) -> Self {
        s.positions
    }
}

/// `sum_i (||x - a_i|| - d_i)^2`, defined everywhere (including at sensors).
pub fn localization_value(x: &Vector, sensors: &SensorArray, ranges: &[f64]) -> f64 {
    sensors
        .positions
        .iter()
        .zip(ranges)
        .map(|(a, d)| {
            let r = x.distance(a) - d;
            r * r
        })
        .sum()
}

/// Range-based least-squares loss `sum_i (r_i - d_i)^2`, `r_i = ||x - a_i||`,
/// with its gradient `sum_i 2 (r_i - d_i) u_i` and Hessian
/// `sum_i 2 [(1 - d_i/r_i) I + (d_i/r_i) u_i u_i^T]`, `u_i = (x - a_i)/r_i`.
///
/// The loss is nonconvex and nonsmooth at the sensors; points within
/// [`SENSOR_CLEARANCE`] of a sensor are rejected.
pub fn localization_loss(x: &Vector, sensors: &SensorArray, ranges: &[f64]) -> Result<Evaluation, OracleError> {
    let n = sensors.dim();
    if x.len() != n {
        return Err(OracleError::DimensionMismatch { expected: n, found: x.len() });
    }
    if ranges.len() != sensors.len() {
        return Err(OracleError::DimensionMismatch { expected: sensors.len(), found: ranges.len() });
    }
    let mut value = 0.0;
    let mut gradient = Vector::zeros(n);
    let mut hessian = SymMatrix::zeros(n);
    for (i, (a, &d)) in sensors.positions.iter().zip(ranges).enumerate() {
        let diff = x - a;
        let r = diff.norm();
        if r <= SENSOR_CLEARANCE {
            return Err(OracleError::SensorCoincidence { sensor: i, distance: r });
        }
        let u = diff.scaled(1.0 / r);
        let residual = r - d;
        value += residual * residual;
        gradient = gradient.axpy(2.0 * residual, &u);
        hessian.add_identity(2.0 * (1.0 - d / r));
        hessian.add_outer(2.0 * d / r, &u);
    }
    Ok(Evaluation { value, gradient, hessian })
}

/// Time-varying localization loss: one set of range measurements per round.
#[derive(Debug, Clone)]
pub struct LocalizationLoss {
    sensors: SensorArray,
    measurements: Vec<Vec<f64>>,
}

impl LocalizationLoss {
    pub fn new(sensors: SensorArray, measurements: Vec<Vec<f64>>) -> Result<Self, OracleError> {
        if let Some(bad) = measurements.iter().find(|d| d.len() != sensors.len()) {
            return Err(OracleError::DimensionMismatch { expected: sensors.len(), found: bad.len() });
        }
        Ok(LocalizationLoss { sensors, measurements })
    }

    pub fn sensors(&self) -> &SensorArray {
        &self.sensors
    }

    pub fn measurements(&self, t: usize) -> &[f64] {
        &self.measurements[t]
    }

    fn check(&self, t: usize, x: &Vector) -> Result<(), OracleError> {
        check_point(self.sensors.dim(), self.measurements.len(), t, x)
    }
}

impl LossOracle for LocalizationLoss {
    fn dim(&self) -> usize {
        self.sensors.dim()
    }

    fn rounds(&self) -> usize {
        self.measurements.len()
    }

    fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError> {
        self.check(t, x)?;
        Ok(localization_value(x, &self.sensors, &self.measurements[t]))
    }

    fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
        self.check(t, x)?;
        Ok(localization_loss(x, &self.sensors, &self.measurements[t])?.gradient)
    }

    fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError> {
        self.check(t, x)?;
        Ok(localization_loss(x, &self.sensors, &self.measurements[t])?.hessian)
    }

    fn evaluate(&self, t: usize, x: &Vector) -> Result<Evaluation, OracleError> {
        self.check(t, x)?;
        localization_loss(x, &self.sensors, &self.measurements[t])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn three_sensors() -> SensorArray {
        SensorArray::new(vec![v(&[0.5, 0.5]), v(&[0.0, 0.5]), v(&[0.5, 0.0])]).unwrap()
    }

    #[test]
    fn single_sensor_fixture() {
        // (r - d)^2 with r = 2, d = 1: value 1, gradient 2 (r - d) u = (2, 0),
        // Hessian 2 [(1 - 1/2) I + (1/2) e1 e1^T] = diag(2, 1).
        let sensors = SensorArray::new(vec![v(&[0.0, 0.0])]).unwrap();
        let e = localization_loss(&v(&[2.0, 0.0]), &sensors, &[1.0]).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.gradient.as_slice(), &[2.0, 0.0]);
        assert_eq!(e.hessian.to_rows(), vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn consistent_measurements_give_zero_loss() {
        let sensors = three_sensors();
        let x = v(&[2.0, 1.0]);
        let d = sensors.ranges(&x);
        let e = localization_loss(&x, &sensors, &d).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.gradient.norm() < 1e-15);
    }

    #[test]
    fn noiseless_hessian_is_gauss_newton_term() {
        // With d_i = r_i the Hessian reduces to 2 sum u_i u_i^T.
        let sensors = three_sensors();
        let x = v(&[2.0, 1.0]);
        let d = sensors.ranges(&x);
        let h = localization_loss(&x, &sensors, &d).unwrap().hessian;
        let mut expected = SymMatrix::zeros(2);
        for a in sensors.positions() {
            expected.add_outer(2.0, &(&x - a).normalized().unwrap());
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.get(i, j) - expected.get(i, j)).abs() < 1e-10);
            }
        }
        assert!(crate::linalg::min_singular_value(&h) > 0.0);
    }

    #[test]
    fn rejects_points_at_sensors() {
        let sensors = three_sensors();
        let err = localization_loss(&v(&[0.0, 0.5]), &sensors, &[1.0, 1.0, 1.0]).unwrap_err();
        assert_eq!(err, OracleError::SensorCoincidence { sensor: 1, distance: 0.0 });
        // The value alone stays defined there.
        let expected = 0.25 + 1.0 + (0.5f64.sqrt() - 1.0).powi(2);
        let value = localization_value(&v(&[0.0, 0.5]), &sensors, &[1.0, 1.0, 1.0]);
        assert!((value - expected).abs() < 1e-15);
    }

    #[test]
    fn oracle_checks_round_range() {
        let loss = LocalizationLoss::new(three_sensors(), vec![vec![1.0; 3]]).unwrap();
        assert!(matches!(
            loss.value(1, &v(&[2.0, 1.0])),
            Err(OracleError::RoundOutOfRange { round: 1, rounds: 1 })
        ));
        assert!(LocalizationLoss::new(three_sensors(), vec![vec![1.0; 2]]).is_err());
    }
}
