use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LinalgError, Vector};

/// Dense real symmetric matrix.
///
/// Storage is full row-major, but every constructor and mutator writes
/// `(i, j)` and `(j, i)` together, so symmetry is exact.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self, LinalgError> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        Ok(m)
    }

    /// Builds the matrix from its upper triangle: `f(i, j)` is called for
    /// `i <= j` only and mirrored.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(LinalgError::NonFinite { index: i * n + j });
                }
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        Ok(m)
    }

    /// Builds the matrix from full rows, which must be square and exactly
    /// symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(LinalgError::DimensionMismatch { expected: n, found: bad.len() });
        }
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(LinalgError::NonFinite { index: i * n + j });
                }
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymMatrix { n, data: rows.iter().flatten().copied().collect() })
    }

    /// `alpha * u u^T`
    pub fn outer(alpha: f64, u: &Vector) -> Self {
        let n = u.len();
        let mut m = Self::zeros(n);
        m.add_outer(alpha, u);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += alpha * u u^T`
    pub fn add_outer(&mut self, alpha: f64, u: &Vector) {
        debug_assert_eq!(u.len(), self.n);
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let v = self.data[i * n + j] + alpha * u[i] * u[j];
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    /// `self += alpha * I`
    pub fn add_identity(&mut self, alpha: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += alpha;
        }
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(x.len(), self.n);
        let out = (0..self.n)
            .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
            .collect();
        Vector::from_vec_unchecked(out)
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|v| v * factor).collect() }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.n, other.n);
        SymMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.n, other.n);
        SymMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `P^T M P` for a congruence by an arbitrary square matrix given as rows.
    /// The result is symmetrized from its upper triangle.
    pub fn congruence(&self, p: &[Vec<f64>]) -> SymMatrix {
        let n = self.n;
        debug_assert_eq!(p.len(), n);
        let mut mp = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                mp[i * n + j] = (0..n).map(|k| self.get(i, k) * p[k][j]).sum();
            }
        }
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|k| p[k][i] * mp[k * n + j]).sum();
                out.set(i, j, v);
            }
        }
        out
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.n).map(|i| self.row(i))).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = LinalgError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        m.to_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_requires_exact_symmetry() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-15, 1.0]]).unwrap_err();
        assert!(matches!(err, LinalgError::NotSymmetric { .. }));
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_ok());
        assert!(matches!(
            SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn outer_and_mul_vec() {
        let u = Vector::new(vec![1.0, 2.0]).unwrap();
        let m = SymMatrix::outer(2.0, &u);
        assert_eq!(m.to_rows(), vec![vec![2.0, 4.0], vec![4.0, 8.0]]);
        let y = m.mul_vec(&Vector::new(vec![1.0, -1.0]).unwrap());
        assert_eq!(y.as_slice(), &[-2.0, -4.0]);
        assert_eq!(m.norm_inf(), 12.0);
    }
}
