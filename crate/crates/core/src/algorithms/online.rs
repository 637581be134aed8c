use serde::{Deserialize, Serialize};

use super::{ogd_step, onm_step, OgdConfig, OnmState, StepError};
use crate::analysis::RoundRecord;
use crate::linalg::Vector;
use crate::oracle::LossOracle;

/// Online learner driven by [`run_online`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Onm,
    Ogd(OgdConfig),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Onm => "onm",
            Algorithm::Ogd(_) => "ogd",
        }
    }

    fn step<O: LossOracle + ?Sized>(&self, oracle: &O, x: &Vector, t: usize) -> Result<Vector, StepError> {
        match self {
            Algorithm::Onm => Ok(onm_step(oracle, &OnmState { x: x.clone(), t })?.x),
            Algorithm::Ogd(cfg) => ogd_step(oracle, x, t, cfg),
        }
    }
}

/// Records of a run and, if it stopped early, the error that stopped it.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRun {
    pub records: Vec<RoundRecord>,
    pub failure: Option<StepError>,
}

impl OnlineRun {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Plays `x_0` and then, for each round `t = 0, 1, ...`, observes `f_t`,
/// records `f_t(x_t)` against `f_t(x_t*)` and updates to `x_{t+1}` using
/// only `f_t`. One round per supplied optimum.
///
/// `targets`, when given, are attached to the records as the ground truth
/// the optima estimate.
pub fn run_online<O: LossOracle + ?Sized>(
    oracle: &O,
    optima: &[Vector],
    x0: Vector,
    algorithm: &Algorithm,
    targets: Option<&[Vector]>,
) -> OnlineRun {
    let mut records = Vec::with_capacity(optima.len());
    let mut x = x0;
    for (t, x_star) in optima.iter().enumerate() {
        let losses = oracle.value(t, &x).and_then(|fx| Ok((fx, oracle.value(t, x_star)?)));
        let (loss_at_x, loss_at_star) = match losses {
            Ok(pair) => pair,
            Err(source) => return OnlineRun { records, failure: Some(StepError::Oracle { round: t, source }) },
        };
        let target = targets.map(|p| p[t].clone());
        records.push(RoundRecord::new(t, x.clone(), x_star.clone(), loss_at_x, loss_at_star, target));
        if t + 1 == optima.len() {
            break;
        }
        match algorithm.step(oracle, &x, t) {
            Ok(next) => x = next,
            Err(e) => return OnlineRun { records, failure: Some(e) },
        }
    }
    OnlineRun { records, failure: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::oracle::QuadraticLoss;

    #[test]
    fn onm_is_exact_after_the_first_round() {
        let a = SymMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let centers = vec![Vector::from_slice(&[1.0, 1.0]).unwrap(); 5];
        let q = QuadraticLoss::with_centers(a, &centers).unwrap();
        let run = run_online(&q, &centers, Vector::zeros(2), &Algorithm::Onm, None);
        assert!(run.is_complete());
        assert_eq!(run.records.len(), 5);
        // f(0) - f(1,1) = 0 - (-3)
        assert_eq!(run.records[0].loss_at_x - run.records[0].loss_at_star, 3.0);
        assert!(run.records[1..].iter().all(|r| r.error == 0.0));
    }

    #[test]
    fn singular_round_stops_the_run() {
        let a = SymMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let q = QuadraticLoss::new(a, vec![Vector::zeros(2); 3]).unwrap();
        let optima = vec![Vector::zeros(2); 3];
        let run = run_online(&q, &optima, Vector::from_slice(&[1.0, 0.0]).unwrap(), &Algorithm::Onm, None);
        assert_eq!(run.records.len(), 1);
        assert_eq!(run.failure.unwrap().round(), 0);
    }
}
