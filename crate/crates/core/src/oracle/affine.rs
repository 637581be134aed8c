use super::{check_point, Evaluation, LossOracle, OracleError};
use crate::linalg::{SymMatrix, Vector};

/// `g_t(y) = f_t(S y + b)` for a square matrix `S` given by rows.
///
/// Gradient `S^T grad f`, Hessian `S^T H S`.
#[derive(Debug, Clone)]
pub struct AffineComposition<O> {
    inner: O,
    s: Vec<Vec<f64>>,
    shift: Vector,
}

impl<O: LossOracle> AffineComposition<O> {
    pub fn new(inner: O, s: Vec<Vec<f64>>, shift: Vector) -> Result<Self, OracleError> {
        let n = inner.dim();
        if let Some(bad) = s.iter().find(|row| row.len() != n) {
            return Err(OracleError::DimensionMismatch { expected: n, found: bad.len() });
        }
        if s.len() != n || shift.len() != n {
            return Err(OracleError::DimensionMismatch { expected: n, found: s.len().min(shift.len()) });
        }
        Ok(AffineComposition { inner, s, shift })
    }

    /// `S y + b`
    pub fn map(&self, y: &Vector) -> Vector {
        let sy: Vec<f64> = self.s.iter().map(|row| row.iter().zip(y.iter()).map(|(a, b)| a * b).sum()).collect();
        &Vector::from_vec_unchecked(sy) + &self.shift
    }

    fn pull_back(&self, g: &Vector) -> Vector {
        let n = g.len();
        Vector::from_vec_unchecked((0..n).map(|j| (0..n).map(|i| self.s[i][j] * g[i]).sum()).collect())
    }
}

impl<O: LossOracle> LossOracle for AffineComposition<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rounds(&self) -> usize {
        self.inner.rounds()
    }

    fn value(&self, t: usize, y: &Vector) -> Result<f64, OracleError> {
        check_point(self.dim(), self.rounds(), t, y)?;
        self.inner.value(t, &self.map(y))
    }

    fn gradient(&self, t: usize, y: &Vector) -> Result<Vector, OracleError> {
        check_point(self.dim(), self.rounds(), t, y)?;
        Ok(self.pull_back(&self.inner.gradient(t, &self.map(y))?))
    }

    fn hessian(&self, t: usize, y: &Vector) -> Result<SymMatrix, OracleError> {
        check_point(self.dim(), self.rounds(), t, y)?;
        Ok(self.inner.hessian(t, &self.map(y))?.congruence(&self.s))
    }

    fn evaluate(&self, t: usize, y: &Vector) -> Result<Evaluation, OracleError> {
        check_point(self.dim(), self.rounds(), t, y)?;
        let e = self.inner.evaluate(t, &self.map(y))?;
        Ok(Evaluation { value: e.value, gradient: self.pull_back(&e.gradient), hessian: e.hessian.congruence(&self.s) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_derivatives, QuadraticLoss};

    #[test]
    fn composed_quadratic_has_congruent_hessian() {
        let q = QuadraticLoss::single(SymMatrix::diagonal(&[2.0, 4.0]).unwrap(), Vector::zeros(2)).unwrap();
        let s = vec![vec![1.0, 2.0], vec![0.0, 1.0]];
        let g = AffineComposition::new(q, s, Vector::from_slice(&[1.0, -1.0]).unwrap()).unwrap();
        // S^T diag(2,4) S = [[2, 4], [4, 12]]
        let h = g.hessian(0, &Vector::zeros(2)).unwrap();
        assert_eq!(h.to_rows(), vec![vec![2.0, 4.0], vec![4.0, 12.0]]);
        check_derivatives(&g, 0, &Vector::from_slice(&[0.3, 0.7]).unwrap()).unwrap();
    }
}
