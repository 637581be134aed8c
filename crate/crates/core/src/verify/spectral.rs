//! Inverse-norm sampling and quadratic-map convergence.

use rand::Rng;

use super::instances::{random_symmetric, uniform};
use super::{PropertyResult, Suite, Tally, VerifySettings};
use crate::algorithms::{quadratic_map_iterate, QuadraticMapParams};
use crate::linalg::{min_singular_value, operator_norm, solve_symmetric, SymMatrix, Vector};
use crate::random::unit_vector;

/// Matrices with `sigma_min < COND_FLOOR * ||M||` are skipped.
const COND_FLOOR: f64 = 1e-3;
const INVERSE_TOLERANCE: f64 = 1e-8;

pub(super) fn lemma1(settings: &VerifySettings) -> Vec<PropertyResult> {
    let mut sampled = Tally::new(Suite::Lemma1, "min_image_norm");
    let mut inverse = Tally::new(Suite::Lemma1, "inverse_norm_product");
    for i in 0..settings.lemma1_matrices {
        let mut rng = settings.instance_stream(Suite::Lemma1, i);
        let n = rng.random_range(2..=6);
        let m = random_symmetric(&mut rng, n);
        let sigma = min_singular_value(&m);
        if sigma < COND_FLOOR * operator_norm(&m) {
            sampled.skip();
            inverse.skip();
            continue;
        }

        let smallest = (0..settings.unit_vectors)
            .map(|_| m.mul_vec(&unit_vector(&mut rng, n)).norm())
            .fold(f64::INFINITY, f64::min);
        sampled.check_slack(smallest - sigma, || {
            format!("matrix {i}: min |Mv| = {smallest:e} below sigma_min = {sigma:e}")
        });

        match inverse_by_columns(&m) {
            Ok(inv) => {
                let product = operator_norm(&inv) * sigma;
                let slack = INVERSE_TOLERANCE - (product - 1.0).abs();
                inverse.check(slack, slack >= 0.0, || format!("matrix {i}: |M^-1| sigma_min = {product:.17e}"));
            }
            Err(e) => inverse.failed_instance(format!("matrix {i}: {e}")),
        }
    }
    vec![sampled.finish(), inverse.finish()]
}

/// `M^{-1}` assembled from solves against the unit vectors, symmetrized.
fn inverse_by_columns(m: &SymMatrix) -> Result<SymMatrix, crate::linalg::LinalgError> {
    let n = m.n();
    let columns = (0..n)
        .map(|j| {
            let mut e = Vector::zeros(n);
            e[j] = 1.0;
            solve_symmetric(m, &e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SymMatrix::from_upper_fn(n, |i, j| 0.5 * (columns[j][i] + columns[i][j]))
}

const PRODUCTS: [f64; 4] = [0.1, 0.5, 0.9, 0.99];
const CURVATURES: [f64; 3] = [0.25, 1.0, 4.0];
const BELOW_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const ABOVE_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.9, 0.999];
const RANDOM_STARTS: usize = 2;
const MAP_STEPS: usize = 10_000;
/// Monotonicity is checked until the orbit is this close to `x_lower`.
const SETTLED: f64 = 1e-12;
const CONVERGED: f64 = 1e-8;

pub(super) fn lemma4(settings: &VerifySettings) -> (Vec<PropertyResult>, Vec<String>) {
    let mut below = Tally::new(Suite::Lemma4, "non_decreasing_from_below");
    let mut above = Tally::new(Suite::Lemma4, "decreasing_from_above");
    let mut converges = Tally::new(Suite::Lemma4, "converges_to_lower_fixed_point");
    let mut notes = Vec::new();

    let mut index = 0;
    for &product in &PRODUCTS {
        for &c in &CURVATURES {
            let v = product / (4.0 * c);
            let params = match QuadraticMapParams::new(c, v) {
                Ok(p) => p,
                Err(e) => {
                    converges.failed_instance(format!("c = {c}, v = {v}: {e}"));
                    continue;
                }
            };
            let (lo, hi) = (params.x_lower, params.x_upper);
            let mut rng = settings.instance_stream(Suite::Lemma4, index);
            index += 1;

            let mut starts_below: Vec<f64> = BELOW_FRACTIONS.iter().map(|f| f * lo).collect();
            starts_below.extend((0..RANDOM_STARTS).map(|_| uniform(&mut rng, 0.0, lo)));
            let mut starts_above: Vec<f64> = ABOVE_FRACTIONS.iter().map(|f| lo + f * (hi - lo)).collect();
            starts_above.extend((0..RANDOM_STARTS).map(|_| lo + rng.random::<f64>() * (hi - lo)));

            let mut steps_below = 0;
            let mut steps_above = 0;
            for (starts, tally, rising) in
                [(&starts_below, &mut below, true), (&starts_above, &mut above, false)]
            {
                for &x0 in starts {
                    let mut orbit = vec![x0];
                    orbit.extend(quadratic_map_iterate(&params, x0, MAP_STEPS));
                    let slack = monotone_slack(&orbit, lo, rising);
                    let holds = if rising { slack >= 0.0 } else { slack > 0.0 };
                    tally.check(slack, holds, || format!("c = {c}, v = {v}, x0 = {x0:e}: wrong direction by {slack:e}"));

                    let hit = orbit.iter().position(|x| (x - lo).abs() <= CONVERGED);
                    let tail_error = hit.map_or(f64::INFINITY, |k| {
                        orbit[k..].iter().map(|x| (x - lo).abs()).fold(0.0, f64::max)
                    });
                    let slack = CONVERGED - tail_error;
                    converges.check(slack, slack >= 0.0, || {
                        format!("c = {c}, v = {v}, x0 = {x0:e}: not within {CONVERGED:e} after {MAP_STEPS} steps")
                    });
                    let steps = hit.unwrap_or(MAP_STEPS);
                    if rising {
                        steps_below = steps_below.max(steps);
                    } else {
                        steps_above = steps_above.max(steps);
                    }
                }
            }
            notes.push(format!(
                "4cv = {product:<4} c = {c:<4} v = {v:.6e}  x_lower = {lo:.12e}  x_upper = {hi:.12e}  \
                 steps from below <= {steps_below}  steps from above <= {steps_above}"
            ));
        }
    }
    (vec![below.finish(), above.finish(), converges.finish()], notes)
}

/// Smallest signed step `x_{k+1} - x_k` (negated when falling) while the
/// orbit is farther than [`SETTLED`] from `lo`; `+inf` if it starts settled.
fn monotone_slack(orbit: &[f64], lo: f64, rising: bool) -> f64 {
    let sign = if rising { 1.0 } else { -1.0 };
    orbit
        .windows(2)
        .take_while(|w| (w[0] - lo).abs() > SETTLED)
        .map(|w| sign * (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min)
}
