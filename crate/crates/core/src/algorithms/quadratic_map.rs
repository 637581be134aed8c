//! The scalar map `x -> c x^2 + v`.
//!
//! For `4cv <= 1` it has fixed points `x_lower <= x_upper`. Orbits started in
//! `[0, x_upper)` converge to `x_lower`: monotonically decreasing from above
//! it and non-decreasing from below.

use serde::Serialize;
use thiserror::Error;

/// Iteration stops once consecutive iterates differ by at most this.
pub const MAP_STEP_TOLERANCE: f64 = 1e-14;
pub const MAP_MAX_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadraticMapError {
    #[error("no real fixed point: 4cv = {product} > 1")]
    NoRealFixedPoint { product: f64 },
    #[error("invalid {name} = {value}")]
    Invalid { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticMapParams {
    pub c: f64,
    pub v: f64,
    pub x_upper: f64,
    pub x_lower: f64,
}

impl QuadraticMapParams {
    pub fn new(c: f64, v: f64) -> Result<Self, QuadraticMapError> {
        let (x_lower, x_upper) = quadratic_map_fixed_points(c, v)?;
        Ok(QuadraticMapParams { c, v, x_upper, x_lower })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.c * x * x + self.v
    }
}

/// Fixed points `(x_lower, x_upper)` of `x -> c x^2 + v`.
///
/// `x_lower` is evaluated as `2v / (1 + sqrt(1 - 4cv))`, which avoids the
/// cancellation in `(1 - sqrt(1 - 4cv)) / 2c` for small `cv`.
pub fn quadratic_map_fixed_points(c: f64, v: f64) -> Result<(f64, f64), QuadraticMapError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(QuadraticMapError::Invalid { name: "c", value: c });
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(QuadraticMapError::Invalid { name: "v", value: v });
    }
    let product = 4.0 * c * v;
    if product > 1.0 {
        return Err(QuadraticMapError::NoRealFixedPoint { product });
    }
    let root = (1.0 - product).sqrt();
    Ok((2.0 * v / (1.0 + root), (1.0 + root) / (2.0 * c)))
}

/// `(x_1, ..., x_n)` from `x_0`. Divergent orbits run to `inf`.
pub fn quadratic_map_iterate(params: &QuadraticMapParams, x0: f64, n: usize) -> Vec<f64> {
    let mut x = x0;
    (0..n)
        .map(|_| {
            x = params.apply(x);
            x
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convergence {
    pub limit: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Iterates until `|x_{k+1} - x_k| <= 1e-14` or `1e5` steps.
pub fn quadratic_map_converge(params: &QuadraticMapParams, x0: f64) -> Convergence {
    let mut x = x0;
    for steps in 1..=MAP_MAX_STEPS {
        let next = params.apply(x);
        let done = (next - x).abs() <= MAP_STEP_TOLERANCE;
        x = next;
        if done || !x.is_finite() {
            return Convergence { limit: x, steps, converged: done };
        }
    }
    Convergence { limit: x, steps: MAP_MAX_STEPS, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_iterates() {
        let p = QuadraticMapParams::new(1.0, 3.0 / 16.0).unwrap();
        let xs = quadratic_map_iterate(&p, 0.0, 2);
        assert_eq!(xs, vec![0.1875, 57.0 / 256.0]);
    }

    #[test]
    fn fixed_points() {
        assert_eq!(quadratic_map_fixed_points(1.0, 3.0 / 16.0).unwrap(), (0.25, 0.75));
        assert_eq!(quadratic_map_fixed_points(2.0, 0.125).unwrap(), (0.25, 0.25));
        assert_eq!(
            quadratic_map_fixed_points(1.0, 0.3).unwrap_err(),
            QuadraticMapError::NoRealFixedPoint { product: 1.2 }
        );
    }

    #[test]
    fn fixed_point_orbit_is_constant() {
        let p = QuadraticMapParams::new(1.0, 3.0 / 16.0).unwrap();
        assert!(quadratic_map_iterate(&p, p.x_lower, 50).iter().all(|&x| x == p.x_lower));
    }

    #[test]
    fn zero_discriminant_increases_toward_quarter() {
        let p = QuadraticMapParams::new(2.0, 0.125).unwrap();
        let xs = quadratic_map_iterate(&p, 0.0, 1000);
        assert!(xs.windows(2).all(|w| w[1] >= w[0]));
        assert!(xs.iter().all(|&x| x <= 0.25));
        assert!(0.25 - xs[999] < 1e-2);
    }

    #[test]
    fn converge_reaches_lower_root() {
        let p = QuadraticMapParams::new(1.0, 3.0 / 16.0).unwrap();
        for x0 in [0.0, 0.1, 0.5, 0.7] {
            let c = quadratic_map_converge(&p, x0);
            assert!(c.converged && (c.limit - 0.25).abs() < 1e-12, "{x0}: {c:?}");
        }
        assert!(!quadratic_map_converge(&p, 0.8).limit.is_finite());
    }
}
