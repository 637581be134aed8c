//! Round optimum `x_t*` by grid scan plus Newton polish.

use thiserror::Error;

use super::{LossOracle, OracleError};
use crate::linalg::{min_singular_value, solve_symmetric, symmetric_eigenvalues, LinalgError, Vector};

pub const MIN_GRID: usize = 50;
/// Polish stops once the gradient norm reaches this level.
pub const POLISH_TARGET: f64 = 1e-12;
/// A polished point is accepted only below this gradient norm.
pub const POLISH_ACCEPT: f64 = 1e-10;
pub const POLISH_MAX_STEPS: usize = 50;

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    lower: Vector,
    upper: Vector,
}

impl SearchBox {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self, OptimumError> {
        if lower.len() != upper.len() || lower.iter().zip(upper.iter()).any(|(l, u)| !(l < u)) {
            return Err(OptimumError::BadRequest("box needs lower < upper in every coordinate".into()));
        }
        Ok(SearchBox { lower, upper })
    }

    /// Hypercube of half-width `half_width` centered on `center`.
    pub fn centered(center: &Vector, half_width: f64) -> Result<Self, OptimumError> {
        let lower = Vector::new(center.iter().map(|c| c - half_width).collect())?;
        let upper = Vector::new(center.iter().map(|c| c + half_width).collect())?;
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.iter().zip(self.lower.iter().zip(self.upper.iter())).all(|(v, (l, u))| l <= v && v <= u)
    }
}

/// What the round optimum means.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimumMode {
    /// Global minimizer within the box: grid scan on values, then polish.
    Minimize,
    /// Stationary point (any signature): Newton polish from `seed` with no
    /// value-based filtering; the box is only used to reject escapes.
    Stationary { seed: Vector },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimumError {
    #[error("best grid point lies on the box boundary; widen the box")]
    NoInteriorMinimum,
    #[error("Newton polish stalled at gradient norm {gradient_norm:e}")]
    PolishFailed { gradient_norm: f64 },
    #[error("polished point is a stationary point but not a local minimum")]
    NotAMinimum,
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Finds the round-`t` optimum inside `bounds`.
///
/// In [`OptimumMode::Minimize`] the loss is scanned on a `grid`-per-axis
/// lattice (grid points where the loss is undefined are skipped); the best
/// point must be interior. The winner, or the seed in stationary mode, is
/// polished with unit Newton steps until `||grad|| <= 1e-12` or 50 steps.
/// A returned point always has `||grad|| <= 1e-10`.
pub fn brute_force_optimum<O: LossOracle + ?Sized>(
    oracle: &O,
    t: usize,
    bounds: &SearchBox,
    grid: usize,
    mode: &OptimumMode,
) -> Result<Vector, OptimumError> {
    if bounds.dim() != oracle.dim() {
        return Err(OracleError::DimensionMismatch { expected: oracle.dim(), found: bounds.dim() }.into());
    }
    let start = match mode {
        OptimumMode::Minimize => {
            if grid < MIN_GRID {
                return Err(OptimumError::BadRequest(format!("grid must be at least {MIN_GRID}, got {grid}")));
            }
            grid_scan(oracle, t, bounds, grid)?
        }
        OptimumMode::Stationary { seed } => seed.clone(),
    };

    let polished = newton_polish(oracle, t, start)?;
    if !bounds.contains(&polished) {
        return Err(OptimumError::NoInteriorMinimum);
    }
    if matches!(mode, OptimumMode::Minimize) {
        let h = oracle.hessian(t, &polished)?;
        if symmetric_eigenvalues(&h)[0] <= 0.0 || min_singular_value(&h) == 0.0 {
            return Err(OptimumError::NotAMinimum);
        }
    }
    Ok(polished)
}

fn grid_scan<O: LossOracle + ?Sized>(
    oracle: &O,
    t: usize,
    bounds: &SearchBox,
    grid: usize,
) -> Result<Vector, OptimumError> {
    let n = bounds.dim();
    let coord = |axis: usize, k: usize| {
        let (l, u) = (bounds.lower[axis], bounds.upper[axis]);
        l + (u - l) * (k as f64) / ((grid - 1) as f64)
    };
    let mut index = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut point = Vector::zeros(n);
    loop {
        for (axis, &k) in index.iter().enumerate() {
            point[axis] = coord(axis, k);
        }
        match oracle.value(t, &point) {
            Ok(v) if v.is_finite() => {
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, index.clone()));
                }
            }
            Ok(_) | Err(OracleError::SensorCoincidence { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == n {
                let (_, idx) = best.ok_or(OptimumError::NoInteriorMinimum)?;
                if idx.iter().any(|&k| k == 0 || k == grid - 1) {
                    return Err(OptimumError::NoInteriorMinimum);
                }
                let x = idx.iter().enumerate().map(|(a, &k)| coord(a, k)).collect();
                return Ok(Vector::new(x)?);
            }
            index[axis] += 1;
            if index[axis] < grid {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

fn newton_polish<O: LossOracle + ?Sized>(oracle: &O, t: usize, mut x: Vector) -> Result<Vector, OptimumError> {
    let mut best = (f64::INFINITY, x.clone());
    for _ in 0..=POLISH_MAX_STEPS {
        let g = oracle.gradient(t, &x)?;
        let gn = g.norm();
        if gn < best.0 {
            best = (gn, x.clone());
        }
        if gn <= POLISH_TARGET {
            break;
        }
        let step = solve_symmetric(&oracle.hessian(t, &x)?, &g)?;
        if step.norm() == 0.0 || !step.is_finite() {
            break;
        }
        x = &x - &step;
    }
    let (gradient_norm, x) = best;
    if gradient_norm <= POLISH_ACCEPT {
        Ok(x)
    } else {
        Err(OptimumError::PolishFailed { gradient_norm })
    }
}
