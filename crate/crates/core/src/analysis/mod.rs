//! Dynamic-regret accounting and the theoretical regret bounds.

mod bounds;

pub use bounds::{
    bound_comparison, corollary1_bound, theorem1_bound, Assumption, AssumptionCheck, AssumptionChecklist,
    BoundComparison, BoundError, Corollary1Bound, Theorem1Bound, Tighter, TIGHTNESS_SAMPLES,
};

use serde::Serialize;

use crate::linalg::Vector;
use crate::oracle::RegularityConstants;

/// One round of an online run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: usize,
    /// Decision played at round `t`.
    pub x: Vector,
    /// Round optimum (or stationary point).
    pub x_star: Vector,
    pub loss_at_x: f64,
    pub loss_at_star: f64,
    /// `||x - x_star||`
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_target: Option<Vector>,
}

impl RoundRecord {
    pub fn new(
        t: usize,
        x: Vector,
        x_star: Vector,
        loss_at_x: f64,
        loss_at_star: f64,
        true_target: Option<Vector>,
    ) -> Self {
        let error = x.distance(&x_star);
        RoundRecord { t, x, x_star, loss_at_x, loss_at_star, error, true_target }
    }

    pub fn gap(&self) -> f64 {
        self.loss_at_x - self.loss_at_star
    }

    /// Distance to the ground-truth target, when one is attached.
    pub fn tracking_error(&self) -> Option<f64> {
        self.true_target.as_ref().map(|p| self.x.distance(p))
    }
}

/// `sum_t (f_t(x_t) - f_t(x_t*))`, summed in record order.
pub fn compute_regret(records: &[RoundRecord]) -> f64 {
    records.iter().map(RoundRecord::gap).sum()
}

/// `sum_t ||x_{t-1}* - x_t*||`.
pub fn total_variation(optima: &[Vector]) -> f64 {
    optima.windows(2).map(|w| w[0].distance(&w[1])).sum()
}

/// Regret summary of one run, with the bounds evaluated against the
/// constants supplied to [`RegretLedger::evaluate_bounds`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretLedger {
    #[serde(skip)]
    pub records: Vec<RoundRecord>,
    pub regret: f64,
    /// `V_T` of the recorded optima.
    pub total_variation: f64,
    /// `E_T = sum_t e_t`.
    pub error_sum: f64,
    pub delta: f64,
    pub theorem1_bound: Option<f64>,
    pub corollary1_bound: Option<f64>,
    pub checklist: Option<AssumptionChecklist>,
    /// Why a bound could not be evaluated.
    pub bound_notes: Vec<String>,
}

impl RegretLedger {
    pub fn new(records: Vec<RoundRecord>) -> Self {
        let optima: Vec<Vector> = records.iter().map(|r| r.x_star.clone()).collect();
        RegretLedger {
            regret: compute_regret(&records),
            total_variation: total_variation(&optima),
            error_sum: records.iter().map(|r| r.error).sum(),
            delta: 0.0,
            theorem1_bound: None,
            corollary1_bound: None,
            checklist: None,
            bound_notes: Vec::new(),
            records,
        }
    }

    pub fn initial_error(&self) -> f64 {
        self.records.first().map_or(0.0, |r| r.error)
    }

    pub fn final_error(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.error)
    }

    /// Running regret after each round.
    pub fn cumulative_regret(&self) -> Vec<f64> {
        prefix_sums(self.records.iter().map(RoundRecord::gap))
    }

    /// Running `E_t` after each round.
    pub fn prefix_error_sums(&self) -> Vec<f64> {
        prefix_sums(self.records.iter().map(|r| r.error))
    }

    /// Evaluates both bounds post hoc with this run's `V_T`, `e_0` and `e_T`.
    pub fn evaluate_bounds(&mut self, k: &RegularityConstants) {
        self.bound_notes.clear();
        let (e0, e_t) = (self.initial_error(), self.final_error());
        self.delta = k.contraction() * (e0 * e0 - e_t * e_t);
        match theorem1_bound(k, self.total_variation, e0, e_t) {
            Ok(b) => {
                self.theorem1_bound = Some(b.value);
                self.checklist = Some(b.checklist);
            }
            Err(e) => {
                self.theorem1_bound = None;
                self.checklist = Some(AssumptionChecklist::evaluate(k, e0));
                self.bound_notes.push(format!("general bound: {e}"));
            }
        }
        match corollary1_bound(k, e0) {
            Ok(b) => self.corollary1_bound = Some(b.value),
            Err(e) => {
                self.corollary1_bound = None;
                self.bound_notes.push(format!("constant bound: {e}"));
            }
        }
    }
}

fn prefix_sums(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}
