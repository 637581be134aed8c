//! Dense symmetric linear algebra for small systems (n of a few to a few
//! dozen): pivoted indefinite solves, spectral norms and definiteness queries.

mod eigen;
mod ldlt;
mod matrix;
mod vector;

pub use eigen::{min_singular_value, operator_norm, symmetric_eigenvalues};
pub use ldlt::{solve_symmetric, Ldlt, SINGULARITY_THRESHOLD};
pub use matrix::SymMatrix;
pub use vector::Vector;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("singular matrix: pivot {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
}
