use super::StepError;
use crate::linalg::{solve_symmetric, Vector};
use crate::oracle::LossOracle;

/// Decision `x_t` held by the online Newton method before round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnmState {
    pub x: Vector,
    pub t: usize,
}

impl OnmState {
    pub fn new(x: Vector) -> Self {
        OnmState { x, t: 0 }
    }
}

/// One online Newton update on the loss revealed at round `state.t`:
/// `x_{t+1} = x_t - H_t(x_t)^{-1} grad f_t(x_t)`, unit step, one solve.
///
/// A Hessian that fails the singularity test aborts the step.
pub fn onm_step<O: LossOracle + ?Sized>(oracle: &O, state: &OnmState) -> Result<OnmState, StepError> {
    let round = state.t;
    let oracle_err = |source| StepError::Oracle { round, source };
    let gradient = oracle.gradient(round, &state.x).map_err(oracle_err)?;
    let hessian = oracle.hessian(round, &state.x).map_err(oracle_err)?;
    let direction =
        solve_symmetric(&hessian, &gradient).map_err(|source| StepError::SingularHessian { round, source })?;
    Ok(OnmState { x: &state.x - &direction, t: round + 1 })
}
