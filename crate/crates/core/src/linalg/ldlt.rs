//! Symmetric indefinite LDL^T factorization with Bunch-Kaufman pivoting.
//!
//! `P M P^T = L D L^T` with `L` unit lower triangular and `D` block diagonal
//! with 1x1 and 2x2 blocks. Works for indefinite matrices, which the Newton
//! update meets whenever it tracks saddle points.

use super::{LinalgError, SymMatrix, Vector};

/// Relative pivot cutoff: a pivot below `SINGULARITY_THRESHOLD * ||M||_inf`
/// makes the matrix numerically singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
enum Block {
    One(f64),
    /// `[[a, b], [b, c]]`
    Two(f64, f64, f64),
}

#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    /// Strictly lower part of the unit triangular factor, row-major.
    l: Vec<f64>,
    blocks: Vec<Block>,
    /// `perm[i]` is the original index sitting at position `i`.
    perm: Vec<usize>,
    two_by_two: usize,
    min_pivot: f64,
}

impl Ldlt {
    pub fn factor(m: &SymMatrix) -> Result<Self, LinalgError> {
        let n = m.n();
        let threshold = SINGULARITY_THRESHOLD * m.norm_inf();
        let alpha = (1.0 + 17.0_f64.sqrt()) / 8.0;

        let mut a: Vec<f64> = (0..n).flat_map(|i| m.row(i).to_vec()).collect();
        let mut l = vec![0.0; n * n];
        let mut perm: Vec<usize> = (0..n).collect();
        let mut blocks = Vec::with_capacity(n);
        let mut two_by_two = 0;
        let mut min_pivot = f64::INFINITY;

        let at = |i: usize, j: usize| i * n + j;

        let mut k = 0;
        while k < n {
            let akk = a[at(k, k)].abs();
            let (imax, colmax) = ((k + 1)..n)
                .map(|i| (i, a[at(i, k)].abs()))
                .fold((k, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });

            let (pivot_row, size) = if akk >= alpha * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| a[at(imax, j)].abs())
                    .fold(0.0, f64::max);
                if akk * rowmax >= alpha * colmax * colmax {
                    (k, 1)
                } else if a[at(imax, imax)].abs() >= alpha * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };

            let target = k + size - 1;
            if pivot_row != target {
                swap_symmetric(&mut a, n, target, pivot_row);
                for j in 0..k {
                    l.swap(at(target, j), at(pivot_row, j));
                }
                perm.swap(target, pivot_row);
            }

            if size == 1 {
                let d = a[at(k, k)];
                min_pivot = min_pivot.min(d.abs());
                if d.abs() < threshold || d == 0.0 {
                    return Err(LinalgError::SingularMatrix { pivot: d.abs(), threshold });
                }
                for i in (k + 1)..n {
                    l[at(i, k)] = a[at(i, k)] / d;
                }
                for i in (k + 1)..n {
                    for j in (k + 1)..=i {
                        let v = a[at(i, j)] - l[at(i, k)] * a[at(j, k)];
                        a[at(i, j)] = v;
                        a[at(j, i)] = v;
                    }
                }
                blocks.push(Block::One(d));
            } else {
                let (e11, e21, e22) = (a[at(k, k)], a[at(k + 1, k)], a[at(k + 1, k + 1)]);
                let pivot = min_abs_eigenvalue_2x2(e11, e21, e22);
                min_pivot = min_pivot.min(pivot);
                let det = e11 * e22 - e21 * e21;
                if pivot < threshold || det == 0.0 {
                    return Err(LinalgError::SingularMatrix { pivot, threshold });
                }
                for i in (k + 2)..n {
                    let (c1, c2) = (a[at(i, k)], a[at(i, k + 1)]);
                    l[at(i, k)] = (e22 * c1 - e21 * c2) / det;
                    l[at(i, k + 1)] = (e11 * c2 - e21 * c1) / det;
                }
                for i in (k + 2)..n {
                    for j in (k + 2)..=i {
                        let v = a[at(i, j)] - a[at(i, k)] * l[at(j, k)] - a[at(i, k + 1)] * l[at(j, k + 1)];
                        a[at(i, j)] = v;
                        a[at(j, i)] = v;
                    }
                }
                blocks.push(Block::Two(e11, e21, e22));
                two_by_two += 1;
            }
            k += size;
        }

        Ok(Ldlt { n, l, blocks, perm, two_by_two, min_pivot })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn two_by_two_pivots(&self) -> usize {
        self.two_by_two
    }

    /// Smallest pivot magnitude met (1x1 value or 2x2 smallest |eigenvalue|).
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &Vector) -> Result<Vector, LinalgError> {
        if b.len() != self.n {
            return Err(LinalgError::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let n = self.n;
        let mut z: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();

        // L w = z
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.l[i * n + j] * z[j]).sum();
            z[i] -= s;
        }
        // D u = w
        let mut k = 0;
        for block in &self.blocks {
            match *block {
                Block::One(d) => {
                    z[k] /= d;
                    k += 1;
                }
                Block::Two(a, b, c) => {
                    let det = a * c - b * b;
                    let (w1, w2) = (z[k], z[k + 1]);
                    z[k] = (c * w1 - b * w2) / det;
                    z[k + 1] = (a * w2 - b * w1) / det;
                    k += 2;
                }
            }
        }
        // L^T q = u
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.l[j * n + i] * z[j]).sum();
            z[i] -= s;
        }

        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        Vector::new(y)
    }
}

fn swap_symmetric(a: &mut [f64], n: usize, p: usize, q: usize) {
    for j in 0..n {
        a.swap(p * n + j, q * n + j);
    }
    for i in 0..n {
        a.swap(i * n + p, i * n + q);
    }
}

fn min_abs_eigenvalue_2x2(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    (mean - radius).abs().min((mean + radius).abs())
}

/// Solves `M y = b` for symmetric (possibly indefinite) `M` by a pivoted
/// LDL^T factorization followed by one step of iterative refinement.
///
/// Fails with [`LinalgError::SingularMatrix`] when a pivot falls below
/// `1e-12 * ||M||_inf`.
pub fn solve_symmetric(m: &SymMatrix, b: &Vector) -> Result<Vector, LinalgError> {
    if b.len() != m.n() {
        return Err(LinalgError::DimensionMismatch { expected: m.n(), found: b.len() });
    }
    let f = Ldlt::factor(m)?;
    let y = f.solve(b)?;
    let residual = b - &m.mul_vec(&y);
    let correction = f.solve(&residual)?;
    let refined = &y + &correction;
    // Keep the refined iterate only when it actually reduces the residual.
    let refined_residual = (b - &m.mul_vec(&refined)).norm();
    Ok(if refined_residual <= residual.norm() { refined } else { y })
}
