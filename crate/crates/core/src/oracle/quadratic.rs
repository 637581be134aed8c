use super::{check_point, Evaluation, LossOracle, OracleError};
use crate::linalg::{SymMatrix, Vector};

/// `1/2 x^T A x - b^T x`, its gradient `A x - b` and Hessian `A`.
pub fn quadratic_loss(x: &Vector, a: &SymMatrix, b: &Vector) -> Evaluation {
    let ax = a.mul_vec(x);
    Evaluation { value: 0.5 * x.dot(&ax) - b.dot(x), gradient: &ax - b, hessian: a.clone() }
}

/// Quadratic family with a shared Hessian `A` and a linear term `b_t` per
/// round. Its Hessian Lipschitz modulus is zero.
#[derive(Debug, Clone)]
pub struct QuadraticLoss {
    a: SymMatrix,
    linear: Vec<Vector>,
}

impl QuadraticLoss {
    pub fn new(a: SymMatrix, linear: Vec<Vector>) -> Result<Self, OracleError> {
        if let Some(bad) = linear.iter().find(|b| b.len() != a.n()) {
            return Err(OracleError::DimensionMismatch { expected: a.n(), found: bad.len() });
        }
        Ok(QuadraticLoss { a, linear })
    }

    /// A single-round quadratic.
    pub fn single(a: SymMatrix, b: Vector) -> Result<Self, OracleError> {
        Self::new(a, vec![b])
    }

    /// Quadratic family whose stationary points are the given `centers`:
    /// `b_t = A c_t`.
    pub fn with_centers(a: SymMatrix, centers: &[Vector]) -> Result<Self, OracleError> {
        let linear = centers.iter().map(|c| a.mul_vec(c)).collect();
        Self::new(a, linear)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }

    pub fn linear(&self, t: usize) -> &Vector {
        &self.linear[t]
    }
}

impl LossOracle for QuadraticLoss {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn rounds(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, t: usize, x: &Vector) -> Result<f64, OracleError> {
        check_point(self.dim(), self.rounds(), t, x)?;
        Ok(0.5 * x.dot(&self.a.mul_vec(x)) - self.linear[t].dot(x))
    }

    fn gradient(&self, t: usize, x: &Vector) -> Result<Vector, OracleError> {
        check_point(self.dim(), self.rounds(), t, x)?;
        Ok(&self.a.mul_vec(x) - &self.linear[t])
    }

    fn hessian(&self, t: usize, x: &Vector) -> Result<SymMatrix, OracleError> {
        check_point(self.dim(), self.rounds(), t, x)?;
        Ok(self.a.clone())
    }

    fn evaluate(&self, t: usize, x: &Vector) -> Result<Evaluation, OracleError> {
        check_point(self.dim(), self.rounds(), t, x)?;
        Ok(quadratic_loss(x, &self.a, &self.linear[t]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn direct_evaluation() {
        let a = SymMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let e = quadratic_loss(&v(&[0.0, 0.0]), &a, &v(&[2.0, 4.0]));
        assert_eq!(e.value, 0.0);
        assert_eq!(e.gradient.as_slice(), &[-2.0, -4.0]);
        assert_eq!(e.hessian, a);

        let e = quadratic_loss(&v(&[1.0, 1.0]), &SymMatrix::identity(2), &Vector::zeros(2));
        assert_eq!(e.value, 1.0);
        assert_eq!(e.gradient.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn saddle_fixture() {
        let a = SymMatrix::diagonal(&[1.0, -1.0]).unwrap();
        let e = quadratic_loss(&v(&[1.0, 1.0]), &a, &Vector::zeros(2));
        assert_eq!(e.value, 0.0);
        assert_eq!(e.gradient.as_slice(), &[1.0, -1.0]);
        assert_eq!(e.hessian, a);
    }

    #[test]
    fn centers_are_stationary() {
        let a = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, -1.0]]).unwrap();
        let c = v(&[0.25, -0.75]);
        let q = QuadraticLoss::with_centers(a, std::slice::from_ref(&c)).unwrap();
        assert!(q.gradient(0, &c).unwrap().norm() < 1e-15);
    }
}
