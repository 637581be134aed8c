//! Random problem instances for the property suites.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{SymMatrix, Vector};
use crate::oracle::{LocalizationLoss, OracleError, RippleLoss, SensorArray};
use crate::random::{unit_vector, Stream};

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn uniform_point(rng: &mut Stream, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_vec_unchecked((0..n).map(|_| uniform(rng, lo, hi)).collect())
}

fn random_sign(rng: &mut Stream) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Symmetric matrix with independent standard normal entries on and above
/// the diagonal.
pub fn random_symmetric(rng: &mut Stream, n: usize) -> SymMatrix {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, StandardNormal.sample(rng));
        }
    }
    m
}

/// Rows of the reflection `I - 2 u u^T` for a random unit `u`.
pub fn random_reflection(rng: &mut Stream, n: usize) -> Vec<Vec<f64>> {
    let u = unit_vector(rng, n);
    (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - 2.0 * u[i] * u[j]).collect())
        .collect()
}

/// `Q diag(eigs) Q` for a random reflection `Q`.
pub fn with_spectrum(rng: &mut Stream, eigs: &[f64]) -> SymMatrix {
    let q = random_reflection(rng, eigs.len());
    SymMatrix::diagonal(eigs).expect("finite spectrum").congruence(&q)
}

/// Eigenvalues with magnitudes in `[lo, hi]` and random signs.
pub fn random_spectrum(rng: &mut Stream, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| random_sign(rng) * uniform(rng, lo, hi)).collect()
}

/// Invertible `S = Q diag(d)` with `|d_i|` in `[0.5, 2]`, together with
/// `S^{-1} = diag(1/d) Q`.
pub fn random_invertible(rng: &mut Stream, n: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let q = random_reflection(rng, n);
    let d = random_spectrum(rng, n, 0.5, 2.0);
    let s = (0..n).map(|i| (0..n).map(|j| q[i][j] * d[j]).collect()).collect();
    let inverse = (0..n).map(|i| (0..n).map(|j| q[i][j] / d[i]).collect()).collect();
    (s, inverse)
}

pub fn apply_rows(rows: &[Vec<f64>], x: &Vector) -> Vector {
    Vector::from_vec_unchecked(rows.iter().map(|r| r.iter().zip(x.iter()).map(|(a, b)| a * b).sum()).collect())
}

/// Ripple loss with an indefinite-or-definite quadratic part, two or three
/// waves, and the given stationary points.
pub fn random_ripple(rng: &mut Stream, n: usize, centers: Vec<Vector>) -> Result<RippleLoss, OracleError> {
    let eigs = random_spectrum(rng, n, 0.5, 2.0);
    let a = with_spectrum(rng, &eigs);
    let kappa = uniform(rng, 0.1, 1.0);
    let count = rng.random_range(2..=3);
    let waves = (0..count)
        .map(|_| {
            let norm = uniform(rng, 0.5, 1.5);
            unit_vector(rng, n).scaled(norm)
        })
        .collect();
    RippleLoss::new(a, kappa, waves, centers)
}

/// Three or four planar sensors in the unit square.
pub fn random_sensors(rng: &mut Stream) -> SensorArray {
    let count = rng.random_range(3..=4);
    SensorArray::new((0..count).map(|_| uniform_point(rng, 2, 0.0, 1.0)).collect()).expect("distinct planar sensors")
}

/// A target outside the sensor square.
pub fn random_target(rng: &mut Stream) -> Vector {
    Vector::from_vec_unchecked(vec![uniform(rng, 1.5, 3.0), uniform(rng, 0.5, 2.0)])
}

/// Localization oracle with one round per target and range noise `sigma`.
pub fn localization_for(
    rng: &mut Stream,
    sensors: &SensorArray,
    targets: &[Vector],
    sigma: f64,
) -> Result<LocalizationLoss, OracleError> {
    let measurements = targets
        .iter()
        .map(|p| {
            sensors
                .ranges(p)
                .into_iter()
                .map(|d| {
                    let w: f64 = StandardNormal.sample(rng);
                    d + sigma * w
                })
                .collect()
        })
        .collect();
    LocalizationLoss::new(sensors.clone(), measurements)
}

/// Uniform point in `[lo, hi]^2` at least `clearance` from every sensor.
pub fn point_clear_of(rng: &mut Stream, sensors: &SensorArray, lo: f64, hi: f64, clearance: f64) -> Vector {
    loop {
        let x = uniform_point(rng, 2, lo, hi);
        if sensors.positions().iter().all(|a| a.distance(&x) >= clearance) {
            return x;
        }
    }
}
