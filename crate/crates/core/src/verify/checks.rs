//! Finite-difference checks of every oracle and exactness checks of the
//! Newton step.

use rand::Rng;

use super::instances::{
    apply_rows, localization_for, point_clear_of, random_invertible, random_ripple, random_sensors,
    random_spectrum, random_symmetric, random_target, uniform_point, with_spectrum,
};
use super::{PropertyResult, Suite, Tally, VerifySettings};
use crate::algorithms::{onm_step, OnmState};
use crate::linalg::{min_singular_value, operator_norm, Vector};
use crate::oracle::{
    check_derivatives, AffineComposition, DerivativeError, LossOracle, QuadraticLoss,
};
use crate::random::Stream;

const SENSOR_DISTANCE: f64 = 0.2;
const NEWTON_TOLERANCE: f64 = 1e-8;
/// Affine starts need `sigma_min(H) >= WELL_POSED * ||H||`.
const WELL_POSED: f64 = 1e-2;
const MAX_START_DRAWS: usize = 100;

type CaseBuilder = fn(&mut Stream) -> Option<(Box<dyn LossOracle>, Vector)>;

pub(super) fn derivatives(settings: &VerifySettings) -> Vec<PropertyResult> {
    let cases: [(&'static str, CaseBuilder); 4] = [
        ("localization", localization_case),
        ("quadratic", quadratic_case),
        ("ripple", ripple_case),
        ("affine_localization", affine_case),
    ];
    let mut results = Vec::new();
    let mut offset = 0;
    for (name, make) in cases {
        let mut tally = Tally::new(Suite::Derivatives, name);
        for i in 0..settings.derivative_points {
            let mut rng = settings.instance_stream(Suite::Derivatives, offset + i);
            let Some((oracle, x)) = make(&mut rng) else {
                tally.skip();
                continue;
            };
            match check_derivatives(&*oracle, 0, &x) {
                Ok(r) => {
                    let slack = (r.gradient_tolerance - r.gradient_deviation)
                        .min(r.hessian_tolerance - r.hessian_deviation);
                    tally.check(slack, true, String::new);
                }
                Err(DerivativeError::Mismatch { kind, row, col, analytic, numeric, tolerance }) => {
                    let slack = tolerance - (analytic - numeric).abs();
                    tally.check(slack, false, || {
                        format!("point {i}: {kind:?} ({row}, {col}) analytic {analytic:e} vs {numeric:e}")
                    });
                }
                Err(e) => tally.failed_instance(format!("point {i}: {e}")),
            }
        }
        offset += settings.derivative_points;
        results.push(tally.finish());
    }
    results
}

fn localization_case(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let sensors = random_sensors(rng);
    let target = random_target(rng);
    let oracle = localization_for(rng, &sensors, &[target], 1e-2).ok()?;
    let x = point_clear_of(rng, &sensors, -1.0, 3.0, SENSOR_DISTANCE);
    Some((Box::new(oracle), x))
}

fn quadratic_case(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let n = rng.random_range(1..=6);
    let a = random_symmetric(rng, n);
    let b = uniform_point(rng, n, -2.0, 2.0);
    let oracle = QuadraticLoss::single(a, b).ok()?;
    Some((Box::new(oracle), uniform_point(rng, n, -3.0, 3.0)))
}

fn ripple_case(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let n = rng.random_range(1..=4);
    let center = uniform_point(rng, n, -1.0, 1.0);
    let oracle = random_ripple(rng, n, vec![center]).ok()?;
    Some((Box::new(oracle), uniform_point(rng, n, -2.0, 2.0)))
}

fn affine_case(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let sensors = random_sensors(rng);
    let target = random_target(rng);
    let inner = localization_for(rng, &sensors, &[target], 1e-2).ok()?;
    let (s, inverse) = random_invertible(rng, 2);
    let shift = uniform_point(rng, 2, -1.0, 1.0);
    let x = point_clear_of(rng, &sensors, -1.0, 3.0, SENSOR_DISTANCE);
    let y = apply_rows(&inverse, &(&x - &shift));
    Some((Box::new(AffineComposition::new(inner, s, shift).ok()?), y))
}

pub(super) fn newton(settings: &VerifySettings) -> Vec<PropertyResult> {
    let mut exact = Tally::new(Suite::Newton, "one_step_quadratic_exactness");
    for i in 0..settings.newton_instances {
        let mut rng = settings.instance_stream(Suite::Newton, i);
        let n = rng.random_range(1..=6);
        let eigs = random_spectrum(&mut rng, n, 0.5, 3.0);
        let a = with_spectrum(&mut rng, &eigs);
        let x_star = uniform_point(&mut rng, n, -2.0, 2.0);
        let x0 = uniform_point(&mut rng, n, -5.0, 5.0);
        let Ok(q) = QuadraticLoss::with_centers(a, std::slice::from_ref(&x_star)) else {
            exact.skip();
            continue;
        };
        match onm_step(&q, &OnmState::new(x0)) {
            Ok(next) => {
                let miss = next.x.distance(&x_star);
                let slack = NEWTON_TOLERANCE * x_star.norm().max(1.0) - miss;
                exact.check(slack, slack >= 0.0, || format!("instance {i}: one step lands {miss:e} from the minimizer"));
            }
            Err(e) => exact.failed_instance(format!("instance {i}: {e}")),
        }
    }

    let mut covariant = Tally::new(Suite::Newton, "affine_covariance");
    let offset = settings.newton_instances;
    for i in 0..settings.newton_instances {
        let mut rng = settings.instance_stream(Suite::Newton, offset + i);
        let Some((inner, x0)) = (if i % 2 == 0 { ripple_start(&mut rng) } else { localization_start(&mut rng) }) else {
            covariant.skip();
            continue;
        };
        let n = x0.len();
        let (s, inverse) = random_invertible(&mut rng, n);
        let shift = uniform_point(&mut rng, n, -1.0, 1.0);
        let y0 = apply_rows(&inverse, &(&x0 - &shift));
        let direct = onm_step(&*inner, &OnmState::new(x0));
        let composed = AffineComposition::new(&*inner, s, shift)
            .map_err(|e| e.to_string())
            .and_then(|g| onm_step(&g, &OnmState::new(y0)).map(|y| g.map(&y.x)).map_err(|e| e.to_string()));
        match (direct, composed) {
            (Ok(x1), Ok(mapped)) => {
                let gap = x1.x.distance(&mapped);
                let slack = NEWTON_TOLERANCE * x1.x.norm().max(1.0) - gap;
                covariant.check(slack, slack >= 0.0, || format!("instance {i}: transformed step differs by {gap:e}"));
            }
            (Err(e), _) => covariant.failed_instance(format!("instance {i}: {e}")),
            (_, Err(e)) => covariant.failed_instance(format!("instance {i}: {e}")),
        }
    }
    vec![exact.finish(), covariant.finish()]
}

/// A start where the Hessian is well conditioned, so the comparison
/// measures covariance rather than amplified rounding.
fn well_posed_start(
    rng: &mut Stream,
    oracle: &dyn LossOracle,
    mut draw: impl FnMut(&mut Stream) -> Vector,
) -> Option<Vector> {
    (0..MAX_START_DRAWS).map(|_| draw(rng)).find(|x| {
        oracle.hessian(0, x).is_ok_and(|h| min_singular_value(&h) >= WELL_POSED * operator_norm(&h))
    })
}

fn ripple_start(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let n = rng.random_range(2..=4);
    let center = uniform_point(rng, n, -1.0, 1.0);
    let oracle = random_ripple(rng, n, vec![center]).ok()?;
    let x = well_posed_start(rng, &oracle, |r| uniform_point(r, n, -2.0, 2.0))?;
    Some((Box::new(oracle), x))
}

fn localization_start(rng: &mut Stream) -> Option<(Box<dyn LossOracle>, Vector)> {
    let sensors = random_sensors(rng);
    let target = random_target(rng);
    let oracle = localization_for(rng, &sensors, &[target], 1e-2).ok()?;
    let x = well_posed_start(rng, &oracle, |r| point_clear_of(r, &sensors, -1.0, 3.0, SENSOR_DISTANCE))?;
    Some((Box::new(oracle), x))
}
