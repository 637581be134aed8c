//! Newton contraction inside the basin and basin retention under motion.

use rand::Rng;

use super::instances::{random_ripple, random_sensors, random_target, localization_for, uniform, uniform_point};
use super::{PropertyResult, Suite, Tally, VerifySettings};
use crate::algorithms::{onm_step, run_online, Algorithm, OnmState, StepError};
use crate::linalg::Vector;
use crate::oracle::{
    brute_force_optimum, estimate_constants, LocalizationLoss, LossOracle, OptimumMode, RegularityConstants,
    SearchBox, MIN_GRID, MIN_SAMPLES,
};
use crate::random::{point_in_ball, unit_vector, Stream};

/// Starts closer than `gamma - START_MARGIN` to the optimum are evaluated.
pub const START_MARGIN: f64 = 1e-6;
/// Starts are drawn from this multiple of the basin radius.
const START_SPREAD: f64 = 1.25;
const MAX_DRAWS_PER_INSTANCE: usize = 20;
const LOCALIZATION_RADIUS: f64 = 0.5;
const RIPPLE_RADIUS: f64 = 1.0;
const NOISE_LEVELS: [f64; 3] = [0.0, 1e-4, 1e-2];
const TRACK_RETRIES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasinOutcome {
    /// The start is not strictly inside the basin; nothing is claimed.
    OutsideBasin { error: f64, gamma: f64 },
    Step {
        error: f64,
        next_error: f64,
        /// `e - e_next`
        contraction_slack: f64,
        /// `c e^2 - e_next`
        quadratic_slack: f64,
    },
}

/// One Newton step on round `t` from `x`, measured against `x_star`.
pub fn basin_step<O: LossOracle + ?Sized>(
    oracle: &O,
    t: usize,
    x_star: &Vector,
    k: &RegularityConstants,
    x: &Vector,
) -> Result<BasinOutcome, StepError> {
    let error = x.distance(x_star);
    let gamma = k.gamma();
    if !(error <= gamma - START_MARGIN) {
        return Ok(BasinOutcome::OutsideBasin { error, gamma });
    }
    let next = onm_step(oracle, &OnmState { x: x.clone(), t })?;
    let next_error = next.x.distance(x_star);
    Ok(BasinOutcome::Step {
        error,
        next_error,
        contraction_slack: error - next_error,
        quadratic_slack: k.contraction() * error * error - next_error,
    })
}

type Instance = (Box<dyn LossOracle>, Vec<Vector>, RegularityConstants);

pub(super) fn lemma2(settings: &VerifySettings) -> Vec<PropertyResult> {
    let mut contraction = Tally::new(Suite::Lemma2, "newton_error_decreases");
    let mut quadratic = Tally::new(Suite::Lemma2, "newton_error_quadratic");
    let wanted = settings.lemma2_instances;
    let mut index = 0;
    while contraction.instances < wanted && index < wanted * MAX_DRAWS_PER_INSTANCE {
        let mut rng = settings.instance_stream(Suite::Lemma2, index);
        let kind = if index % 2 == 0 { "localization" } else { "ripple" };
        let instance = if index % 2 == 0 { static_localization(&mut rng) } else { static_ripple(&mut rng) };
        index += 1;
        let Some((oracle, optima, k)) = instance else {
            contraction.skip();
            quadratic.skip();
            continue;
        };
        let x_star = &optima[0];
        let (x, _) = point_in_ball(&mut rng, x_star, START_SPREAD * k.gamma());
        match basin_step(&*oracle, 0, x_star, &k, &x) {
            Ok(BasinOutcome::OutsideBasin { .. }) => {
                contraction.skip();
                quadratic.skip();
            }
            Ok(BasinOutcome::Step { error, next_error, contraction_slack, quadratic_slack }) => {
                let at = |what: &str| format!("{kind} instance {index}: {what} (e = {error:e}, next = {next_error:e})");
                contraction.check_slack(contraction_slack, || at("error grew"));
                quadratic.check_slack(quadratic_slack, || at("next error above c e^2"));
            }
            Err(e) => {
                contraction.failed_instance(format!("{kind} instance {index}: {e}"));
                quadratic.failed_instance(format!("{kind} instance {index}: {e}"));
            }
        }
    }
    contraction.short_of(wanted);
    quadratic.short_of(wanted);
    vec![contraction.finish(), quadratic.finish()]
}

/// Noisy single-round localization with its grid-searched minimizer.
fn static_localization(rng: &mut Stream) -> Option<Instance> {
    let sensors = random_sensors(rng);
    let target = random_target(rng);
    let sigma = NOISE_LEVELS[rng.random_range(0..NOISE_LEVELS.len())];
    let oracle = localization_for(rng, &sensors, std::slice::from_ref(&target), sigma).ok()?;
    let bounds = SearchBox::centered(&target, LOCALIZATION_RADIUS).ok()?;
    let x_star = brute_force_optimum(&oracle, 0, &bounds, MIN_GRID, &OptimumMode::Minimize).ok()?;
    let k = estimate_constants(&oracle, std::slice::from_ref(&x_star), LOCALIZATION_RADIUS, MIN_SAMPLES).ok()?;
    Some((Box::new(oracle), vec![x_star], k))
}

fn static_ripple(rng: &mut Stream) -> Option<Instance> {
    let n = rng.random_range(2..=4);
    let center = uniform_point(rng, n, -1.0, 1.0);
    let oracle = random_ripple(rng, n, vec![center.clone()]).ok()?;
    let k = estimate_constants(&oracle, std::slice::from_ref(&center), RIPPLE_RADIUS, MIN_SAMPLES).ok()?;
    Some((Box::new(oracle), vec![center], k))
}

pub(super) fn lemma3(settings: &VerifySettings) -> Vec<PropertyResult> {
    let mut retained = Tally::new(Suite::Lemma3, "error_stays_inside_basin");
    let horizon = settings.lemma3_horizon;
    for i in 0..settings.lemma3_instances {
        let mut rng = settings.instance_stream(Suite::Lemma3, i);
        let kind = if i % 2 == 0 { "ripple" } else { "localization" };
        let instance = if i % 2 == 0 { moving_ripple(&mut rng, horizon) } else { moving_localization(&mut rng, horizon) };
        let Some((oracle, optima, k)) = instance else {
            retained.skip();
            continue;
        };
        let gamma = k.gamma();
        let (x0, _) = point_in_ball(&mut rng, &optima[0], gamma);
        let run = run_online(&*oracle, &optima, x0, &Algorithm::Onm, None);
        if let Some(e) = run.failure {
            retained.failed_instance(format!("{kind} instance {i}: {e}"));
            continue;
        }
        let (slack, round) = run.records[1..]
            .iter()
            .map(|r| (gamma - r.error, r.t))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
        retained.check(slack, slack > 0.0, || {
            format!("{kind} instance {i}: error {:e} >= gamma {gamma:e} at round {round}", gamma - slack)
        });
    }
    vec![retained.finish()]
}

/// Ripple losses whose stationary points take a random walk.
fn moving_ripple(rng: &mut Stream, horizon: usize) -> Option<Instance> {
    let n = rng.random_range(2..=4);
    let origin = uniform_point(rng, n, -1.0, 1.0);
    let shape = random_ripple(rng, n, vec![origin.clone()]).ok()?;
    moving_track(rng, horizon, origin, RIPPLE_RADIUS, |path| {
        shape.with_centers(path).ok().map(|o| Box::new(o) as Box<dyn LossOracle>)
    })
}

/// Noiseless localization of a target taking a random walk.
fn moving_localization(rng: &mut Stream, horizon: usize) -> Option<Instance> {
    let sensors = random_sensors(rng);
    let origin = random_target(rng);
    moving_track(rng, horizon, origin, LOCALIZATION_RADIUS, |path| {
        let ranges = path.iter().map(|p| sensors.ranges(p)).collect();
        LocalizationLoss::new(sensors.clone(), ranges).ok().map(|o| Box::new(o) as Box<dyn LossOracle>)
    })
}

/// Random walk of the optima with every step within the motion allowance
/// of the constants estimated along the walk itself. The step length is
/// halved until that holds.
fn moving_track(
    rng: &mut Stream,
    horizon: usize,
    origin: Vector,
    radius: f64,
    make: impl Fn(Vec<Vector>) -> Option<Box<dyn LossOracle>>,
) -> Option<Instance> {
    let n = origin.len();
    let directions: Vec<Vector> = (0..horizon).map(|_| unit_vector(rng, n)).collect();
    let fractions: Vec<f64> = (0..horizon).map(|_| uniform(rng, 0.25, 1.0)).collect();

    let first = make(vec![origin.clone()])?;
    let mut step = halved_basin(&*first, std::slice::from_ref(&origin), radius)?.motion_allowance();
    for _ in 0..TRACK_RETRIES {
        let mut path = vec![origin.clone()];
        for (d, f) in directions.iter().zip(&fractions) {
            let next = path[path.len() - 1].axpy(step * f, d);
            path.push(next);
        }
        let oracle = make(path.clone())?;
        let k = halved_basin(&*oracle, &path, radius)?;
        let allowance = k.motion_allowance();
        if path.windows(2).all(|w| w[0].distance(&w[1]) <= allowance) {
            return Some((oracle, path, k));
        }
        step = 0.5 * step.min(allowance);
    }
    None
}

/// Estimated constants with the basin radius capped at half its limit,
/// which leaves a positive motion allowance.
fn halved_basin(oracle: &dyn LossOracle, optima: &[Vector], radius: f64) -> Option<RegularityConstants> {
    let k = estimate_constants(oracle, optima, radius, MIN_SAMPLES).ok()?;
    k.with_beta(k.beta().min(k.basin_limit() / 2.0)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::oracle::QuadraticLoss;

    #[test]
    fn start_outside_basin_is_not_stepped() {
        let q = QuadraticLoss::with_centers(SymMatrix::identity(2), &[Vector::zeros(2)]).unwrap();
        let k = RegularityConstants::new(1.0, 0.0, 0.5, 1.0, 0.0, 0.0).unwrap();
        let far = Vector::from_slice(&[0.5, 0.0]).unwrap();
        let outcome = basin_step(&q, 0, &Vector::zeros(2), &k, &far).unwrap();
        assert_eq!(outcome, BasinOutcome::OutsideBasin { error: 0.5, gamma: 0.5 });

        let near = Vector::from_slice(&[0.3, 0.0]).unwrap();
        let BasinOutcome::Step { next_error, contraction_slack, .. } =
            basin_step(&q, 0, &Vector::zeros(2), &k, &near).unwrap()
        else {
            panic!("expected a step");
        };
        assert!(next_error < 1e-15);
        assert!((contraction_slack - 0.3).abs() < 1e-15);
    }

    #[test]
    fn moving_tracks_respect_allowance() {
        let mut rng = crate::random::stream(7, 0);
        let (_, path, k) = moving_ripple(&mut rng, 20).unwrap();
        assert_eq!(path.len(), 21);
        assert!(path.windows(2).all(|w| w[0].distance(&w[1]) <= k.motion_allowance()));
    }
}
