//! Deterministic random streams.
//!
//! Every consumer draws from its own ChaCha8 stream addressed by
//! `(seed, stream id)`. Streams are independent of each other and of the
//! order in which they are used, so serial and parallel executions draw
//! identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::Vector;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniformly distributed unit vector in `R^n`.
pub fn unit_vector(rng: &mut Stream, n: usize) -> Vector {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Some(u) = Vector::from_vec_unchecked(raw).normalized() {
            return u;
        }
    }
}

/// Uniformly distributed point in the closed ball of radius `radius`
/// around `center`. Returns the point and its distance from the center.
pub fn point_in_ball(rng: &mut Stream, center: &Vector, radius: f64) -> (Vector, f64) {
    use rand::Rng;
    let n = center.len();
    let u = unit_vector(rng, n);
    // 1 - U lies in (0, 1], so the sampled radius is never exactly zero.
    let fraction: f64 = 1.0 - rng.random::<f64>();
    let rho = radius * fraction.powf(1.0 / n as f64);
    (center.axpy(rho, &u), rho)
}
