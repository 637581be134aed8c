use super::{check_point, LossOracle, OracleError};
use crate::linalg::{SymMatrix, Vector};

/// Smooth nonconvex test family with known stationary points:
///
/// `f_t(x) = 1/2 y^T A y + kappa * sum_j (1 - cos(w_j^T y))`, `y = x - c_t`.
///
/// `c_t` is a stationary point of `f_t` with Hessian `A + kappa sum_j w_j w_j^T`.
/// Away from `c_t` the cosine terms bend the curvature, so the Hessian is
/// not Lipschitz-trivial and `A` may be indefinite (saddle tracking).
#[derive(Debug, Clone)]
pub struct RippleLoss {
    a: SymMatrix,
    kappa: f64,
    waves: Vec<Vector>,
    centers: Vec<Vector>,
}

impl RippleLoss {
    pub fn new(a: SymMatrix, kappa: f64, waves: Vec<Vector>, centers: Vec<Vector>) -> Result<Self, OracleError> {
        let n = a.n();
        if let Some(bad) = waves.iter().chain(&centers).find(|w| w.len() != n) {
            return Err(OracleError::DimensionMismatch { expected: n, found: bad.len() });
        }
        Ok(RippleLoss { a, kappa, waves, centers })
    }

    pub fn centers(&self) -> &[Vector] {
        &self.centers
    }

    /// Same shape with a different sequence of stationary points.
    pub fn with_centers(&self, centers: Vec<Vector>) -> Result<Self, OracleError> {
        Self::new(self.a.clone(), self.kappa, self.waves.clone(), centers)
    }

    /// Hessian at the stationary points (identical for every round).
    pub fn hessian_at_center(&self) -> SymMatrix {
        let mut h = self.a.clone();
        for w in &self.waves {
            h.add_outer(self.kappa, w);
        }
        h
    }

    fn offset(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
        check_point(self.a.n(), self.centers.len(), t, x)?;
        Ok(x - &self.centers[t])
    }
}

impl LossOracle for RippleLoss {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn rounds(&self) -> usize {
        self.centers.len()
    }

    fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError> {
        let y = self.offset(t, x)?;
        let ripple: f64 = self.waves.iter().map(|w| 1.0 - w.dot(&y).cos()).sum();
        Ok(0.5 * y.dot(&self.a.mul_vec(&y)) + self.kappa * ripple)
    }

    fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
        let y = self.offset(t, x)?;
        let mut g = self.a.mul_vec(&y);
        for w in &self.waves {
            g = g.axpy(self.kappa * w.dot(&y).sin(), w);
        }
        Ok(g)
    }

    fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError> {
        let y = self.offset(t, x)?;
        let mut h = self.a.clone();
        for w in &self.waves {
            h.add_outer(self.kappa * w.dot(&y).cos(), w);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_are_stationary_with_expected_hessian() {
        let a = SymMatrix::diagonal(&[1.0, -0.5]).unwrap();
        let w = Vector::from_slice(&[0.0, 2.0]).unwrap();
        let c = Vector::from_slice(&[0.3, -0.1]).unwrap();
        let f = RippleLoss::new(a, 0.25, vec![w], vec![c.clone()]).unwrap();
        assert_eq!(f.gradient(0, &c).unwrap().norm(), 0.0);
        // -0.5 + 0.25 * 4 = 0.5
        assert_eq!(f.hessian(0, &c).unwrap(), SymMatrix::diagonal(&[1.0, 0.5]).unwrap());
        assert_eq!(f.hessian_at_center(), SymMatrix::diagonal(&[1.0, 0.5]).unwrap());
        assert_eq!(f.value(0, &c).unwrap(), 0.0);
    }
}
