use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::LinalgError;

/// Dense real vector with finite entries.
///
/// Constructors reject NaN and infinities. Arithmetic results are not
/// re-validated.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Vector(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self, LinalgError> {
        Self::new(entries.to_vec())
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// `n` copies of `value`; `value` must be finite.
    pub fn filled(n: usize, value: f64) -> Result<Self, LinalgError> {
        Self::new(vec![value; n])
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean norm, computed with scaling so tiny and huge entries do not
    /// underflow or overflow.
    pub fn norm(&self) -> f64 {
        let scale = self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = self.0.iter().map(|v| (v / scale) * (v / scale)).sum();
        scale * sum.sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `||self - other||`, with the same scaling as [`Vector::norm`].
    pub fn distance(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        let diffs = || self.0.iter().zip(&other.0).map(|(a, b)| a - b);
        let scale = diffs().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let sum: f64 = diffs().map(|v| (v / scale) * (v / scale)).sum();
        scale * sum.sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * factor).collect())
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + alpha * b).collect())
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = LinalgError;

    fn try_from(entries: Vec<f64>) -> Result<Self, Self::Error> {
        Vector::new(entries)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.len(), rhs.len());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.len(), rhs.len());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|v| -v).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { index: 1 })
        ));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_is_scale_safe() {
        let v = Vector::new(vec![3e200, 4e200]).unwrap();
        assert!((v.norm() / 5e200 - 1.0).abs() < 1e-15);
        let w = Vector::new(vec![3e-200, 4e-200]).unwrap();
        assert!((w.norm() / 5e-200 - 1.0).abs() < 1e-15);
        assert_eq!(Vector::zeros(3).norm(), 0.0);
    }
}
