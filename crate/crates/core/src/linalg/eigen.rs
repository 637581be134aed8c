//! Eigenvalues of small symmetric matrices by cyclic Jacobi rotations.

use super::SymMatrix;

const MAX_SWEEPS: usize = 100;

/// All eigenvalues of `m`, ascending.
///
/// Rotations are computed from ratios of entries, so negating the input
/// negates every intermediate value exactly and the spectrum of `-M` is
/// exactly the negated spectrum of `M`.
pub fn symmetric_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let n = m.n();
    let mut a = m.to_rows();
    let scale = m.norm_frobenius();
    if scale == 0.0 {
        return vec![0.0; n];
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    // `theta >= 0.0` also holds for -0.0, keeping M and -M on
                    // the same rotation.
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, p, q, c, s, t);
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

fn rotate(a: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = a.len();
    let apq = a[p][q];
    a[p][p] -= t * apq;
    a[q][q] += t * apq;
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k][p];
        let akq = a[k][q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k][p] = new_kp;
        a[p][k] = new_kp;
        a[k][q] = new_kq;
        a[q][k] = new_kq;
    }
}

/// Spectral norm, `max |lambda|`.
pub fn operator_norm(m: &SymMatrix) -> f64 {
    symmetric_eigenvalues(m).into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Smallest singular value, `min |lambda|`; zero for a singular matrix.
/// Equals `1 / ||M^-1||` when `M` is invertible.
pub fn min_singular_value(m: &SymMatrix) -> f64 {
    if m.n() == 0 {
        return 0.0;
    }
    symmetric_eigenvalues(m).into_iter().map(f64::abs).fold(f64::INFINITY, f64::min)
}
