//! The general `O(V_T + 1)` regret bound, the constant regret bound and
//! their comparison.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::oracle::RegularityConstants;

/// Points sampled from `y in (0, (3L/2h) E_upper)` by [`bound_comparison`].
pub const TIGHTNESS_SAMPLES: usize = 100;

/// Relative tolerance under which the two bounds are reported as equal.
const EQUALITY_TOLERANCE: f64 = 1e-6;

/// Hypotheses of the general bound, numbered as they are usually stated,
/// plus the strict basin condition its proof relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    /// 1: `||H_t(x_t*)^{-1}|| <= 1/h` with `h > 0`.
    InvertibleHessian,
    /// 2: Hessian `L`-Lipschitz on the `beta`-ball around each optimum.
    LipschitzHessian,
    /// 3: `||x_0 - x_0*|| <= gamma`.
    InitialError,
    /// 4: `v_bar <= gamma - (3L/2h) gamma^2`.
    MotionAllowance,
    /// 5: loss `ell`-Lipschitz on the `gamma`-ball around each optimum.
    LipschitzValue,
    /// `gamma < 2h / 3L`, so that `1 - (3L/2h) gamma > 0`.
    BasinInterior,
}

impl Assumption {
    pub fn number(&self) -> Option<u8> {
        match self {
            Assumption::InvertibleHessian => Some(1),
            Assumption::LipschitzHessian => Some(2),
            Assumption::InitialError => Some(3),
            Assumption::MotionAllowance => Some(4),
            Assumption::LipschitzValue => Some(5),
            Assumption::BasinInterior => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Assumption::InvertibleHessian => "h > 0",
            Assumption::LipschitzHessian => "L >= 0 on a beta > 0 ball",
            Assumption::InitialError => "e0 <= gamma",
            Assumption::MotionAllowance => "v_bar <= gamma - (3L/2h) gamma^2",
            Assumption::LipschitzValue => "ell finite on the gamma ball",
            Assumption::BasinInterior => "gamma < 2h/3L",
        }
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => write!(f, "assumption {n} ({})", self.describe()),
            None => write!(f, "basin condition ({})", self.describe()),
        }
    }
}

/// One numeric check: `holds` is `value <= limit` (strict for the basin).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub condition: &'static str,
    pub holds: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionChecklist {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionChecklist {
    pub fn evaluate(k: &RegularityConstants, e0: f64) -> Self {
        let check = |assumption: Assumption, holds: bool, value: f64, limit: f64| AssumptionCheck {
            assumption,
            condition: assumption.describe(),
            holds,
            value,
            limit,
        };
        let limit = k.basin_limit();
        let checks = vec![
            check(Assumption::InvertibleHessian, k.h() > 0.0, k.h(), 0.0),
            check(
                Assumption::LipschitzHessian,
                k.hessian_lipschitz() >= 0.0 && k.beta() > 0.0,
                k.hessian_lipschitz(),
                k.beta(),
            ),
            check(Assumption::InitialError, e0 <= k.gamma(), e0, k.gamma()),
            check(
                Assumption::MotionAllowance,
                k.max_step_variation() <= k.motion_allowance(),
                k.max_step_variation(),
                k.motion_allowance(),
            ),
            check(Assumption::LipschitzValue, k.value_lipschitz().is_finite(), k.value_lipschitz(), k.gamma()),
            check(Assumption::BasinInterior, k.gamma() > 0.0 && k.gamma() < limit, k.gamma(), limit),
        ];
        AssumptionChecklist { checks }
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("{assumption} violated: {value:e} against {limit:e}")]
    AssumptionViolated { assumption: Assumption, value: f64, limit: f64 },
    #[error("condition {condition} fails: {value:e} against {limit:e}")]
    ConditionFailed { condition: &'static str, value: f64, limit: f64 },
}

impl BoundError {
    pub fn assumption(&self) -> Option<Assumption> {
        match self {
            BoundError::AssumptionViolated { assumption, .. } => Some(*assumption),
            BoundError::ConditionFailed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Bound {
    pub value: f64,
    /// `(3L/2h)(e0^2 - eT^2)`
    pub delta: f64,
    /// `1 / (1 - (3L/2h) gamma)`
    pub factor: f64,
    pub checklist: AssumptionChecklist,
}

/// `ell / (1 - (3L/2h) gamma) * (V_T + delta)` with
/// `delta = (3L/2h)(e0^2 - eT^2)`.
///
/// Only the basin condition is fatal. Assumptions 3 and 4 depend on the
/// run and are reported in the checklist; a bound whose checklist does not
/// fully hold is vacuous.
pub fn theorem1_bound(
    k: &RegularityConstants,
    total_variation: f64,
    e0: f64,
    e_final: f64,
) -> Result<Theorem1Bound, BoundError> {
    let checklist = AssumptionChecklist::evaluate(k, e0);
    let fatal = [Assumption::InvertibleHessian, Assumption::LipschitzHessian, Assumption::LipschitzValue, Assumption::BasinInterior];
    if let Some(c) = checklist.failing().find(|c| fatal.contains(&c.assumption)) {
        return Err(BoundError::AssumptionViolated { assumption: c.assumption, value: c.value, limit: c.limit });
    }
    let c = k.contraction();
    let delta = c * (e0 * e0 - e_final * e_final);
    let factor = 1.0 / (1.0 - c * k.gamma());
    Ok(Theorem1Bound { value: k.value_lipschitz() * factor * (total_variation + delta), delta, factor, checklist })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Bound {
    /// `ell * E_lower`
    pub value: f64,
    pub e_lower: f64,
    /// Infinite when `L = 0`.
    #[serde(serialize_with = "serialize_extended")]
    pub e_upper: f64,
}

/// `ell * E_lower`, where `E_lower <= E_upper` are the fixed points of
/// `E -> (3L/2h) E^2 + V_bar + e0`.
///
/// Requires `V_bar + e0 <= h / 6L` and `gamma < E_upper`. With `L = 0` the
/// map is affine: `E_lower = V_bar + e0` and `E_upper` is infinite.
pub fn corollary1_bound(k: &RegularityConstants, e0: f64) -> Result<Corollary1Bound, BoundError> {
    let offset = k.max_total_variation() + e0;
    let l = k.hessian_lipschitz();
    let (e_lower, e_upper) = if l == 0.0 {
        (offset, f64::INFINITY)
    } else {
        let limit = k.h() / (6.0 * l);
        if !(offset <= limit) {
            return Err(BoundError::ConditionFailed { condition: "V_bar + e0 <= h/6L", value: offset, limit });
        }
        // offset <= h/6L means 4 (3L/2h) offset <= 1 up to rounding.
        let c = k.contraction();
        let root = (1.0 - 4.0 * c * offset).max(0.0).sqrt();
        (2.0 * offset / (1.0 + root), (1.0 + root) / (2.0 * c))
    };
    if !(k.gamma() < e_upper) {
        return Err(BoundError::ConditionFailed { condition: "gamma < E_upper", value: k.gamma(), limit: e_upper });
    }
    Ok(Corollary1Bound { value: k.value_lipschitz() * e_lower, e_lower, e_upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tighter {
    General,
    Constant,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundComparison {
    pub theorem1: Theorem1Bound,
    pub corollary1: Corollary1Bound,
    pub tighter: Tighter,
    /// Upper end of the `y` interval, `(3L/2h) E_upper`.
    pub y_upper: f64,
    /// Sampled `y` for which `E_lower (1 - y) < V_T + delta`.
    pub tightness_holds: usize,
    pub samples: usize,
    /// Smallest sampled `y` with `E_lower (1 - y) < h / 6L`.
    pub y_bar: Option<f64>,
}

/// Evaluates both bounds and scans `y` over 100 interior points of
/// `(0, (3L/2h) E_upper)`.
pub fn bound_comparison(
    k: &RegularityConstants,
    total_variation: f64,
    e0: f64,
    e_final: f64,
) -> Result<BoundComparison, BoundError> {
    let theorem1 = theorem1_bound(k, total_variation, e0, e_final)?;
    let corollary1 = corollary1_bound(k, e0)?;

    let (a, b) = (theorem1.value, corollary1.value);
    let tighter = if (a - b).abs() <= EQUALITY_TOLERANCE * a.abs().max(b.abs()) {
        Tighter::Equal
    } else if b < a {
        Tighter::Constant
    } else {
        Tighter::General
    };

    let c = k.contraction();
    let (y_upper, samples) = if c > 0.0 { (c * corollary1.e_upper, TIGHTNESS_SAMPLES) } else { (0.0, 0) };
    let rhs = total_variation + theorem1.delta;
    let basin_sixth = k.h() / (6.0 * k.hessian_lipschitz());
    let ys = (0..samples).map(|i| y_upper * (i as f64 + 0.5) / samples as f64);
    let tightness_holds = ys.clone().filter(|y| corollary1.e_lower * (1.0 - y) < rhs).count();
    let y_bar = ys.clone().find(|y| corollary1.e_lower * (1.0 - y) < basin_sixth);

    Ok(BoundComparison { theorem1, corollary1, tighter, y_upper, tightness_holds, samples, y_bar })
}

fn serialize_extended<S: serde::Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        s.serialize_f64(*value)
    } else {
        s.serialize_str(if *value > 0.0 { "inf" } else { "-inf" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constants(h: f64, l: f64, beta: f64, ell: f64, v_bar: f64, total: f64) -> RegularityConstants {
        RegularityConstants::new(h, l, beta, ell, v_bar, total).unwrap()
    }

    #[test]
    fn general_bound_hand_value() {
        let k = constants(3.0, 1.0, 1.0, 1.0, 0.0, 1.0);
        let b = theorem1_bound(&k, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(b.delta, 0.0);
        assert_eq!(b.factor, 2.0);
        assert_eq!(b.value, 2.0);
        assert!(b.checklist.all_hold());
        assert_eq!(theorem1_bound(&k, 0.0, 0.3, 0.3).unwrap().value, 0.0);
    }

    #[test]
    fn basin_boundary_is_fatal() {
        // gamma = beta = 2 = 2h / 3L
        let k = constants(3.0, 1.0, 2.0, 1.0, 0.0, 1.0);
        let err = theorem1_bound(&k, 1.0, 0.0, 0.0).unwrap_err();
        assert_eq!(err.assumption(), Some(Assumption::BasinInterior));
    }

    #[test]
    fn soft_assumptions_only_flag() {
        // e0 = 1.5 > gamma = 1 and v_bar = 0.6 > allowance 0.5
        let k = constants(3.0, 1.0, 1.0, 1.0, 0.6, 1.0);
        let b = theorem1_bound(&k, 1.0, 1.5, 0.0).unwrap();
        let failing: Vec<_> = b.checklist.failing().map(|c| c.assumption).collect();
        assert_eq!(failing, vec![Assumption::InitialError, Assumption::MotionAllowance]);
    }

    #[test]
    fn constant_bound_fixtures() {
        // zero discriminant: V_bar + e0 = 0.5 = h / 6L
        let k = constants(3.0, 1.0, 1.0 - 1e-9, 1.0, 0.0, 0.5);
        let b = corollary1_bound(&k, 0.0).unwrap();
        assert_eq!((b.e_lower, b.e_upper, b.value), (1.0, 1.0, 1.0));

        let k = constants(3.0, 1.0, 0.5, 1.0, 0.0, 0.0);
        assert_eq!(corollary1_bound(&k, 0.0).unwrap().value, 0.0);

        let k = constants(3.0, 1.0, 0.5, 2.0, 0.0, 0.25);
        let b = corollary1_bound(&k, 0.0).unwrap();
        assert!((b.e_lower - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((b.value - 0.585_786_437_626_905).abs() < 1e-12);
    }

    #[test]
    fn constant_bound_conditions() {
        let k = constants(3.0, 1.0, 0.5, 1.0, 0.0, 0.5);
        assert!(matches!(corollary1_bound(&k, 0.1), Err(BoundError::ConditionFailed { .. })));
        // gamma = 1 is not below E_upper = 1
        let k = constants(3.0, 1.0, 1.0, 1.0, 0.0, 0.5);
        let err = corollary1_bound(&k, 0.0).unwrap_err();
        assert!(matches!(err, BoundError::ConditionFailed { condition: "gamma < E_upper", .. }));
    }

    #[test]
    fn flat_hessian_limit() {
        let k = constants(2.0, 0.0, 0.5, 3.0, 0.1, 0.2);
        let b = corollary1_bound(&k, 0.05).unwrap();
        assert!((b.e_lower - 0.25).abs() < 1e-15);
        assert!(b.e_upper.is_infinite());
        assert!((b.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn comparison_zero_discriminant_is_equal() {
        let k = constants(3.0, 1.0, 1.0 - 1e-9, 1.0, 0.0, 0.5);
        let cmp = bound_comparison(&k, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(cmp.tighter, Tighter::Equal);
        assert!((cmp.theorem1.value - 1.0).abs() < 1e-6);
        assert_eq!(cmp.corollary1.value, 1.0);
    }

    #[test]
    fn comparison_without_variation() {
        let k = constants(3.0, 1.0, 0.5, 1.0, 0.0, 0.0);
        let cmp = bound_comparison(&k, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(cmp.corollary1.value, 0.0);
        assert!(cmp.corollary1.value <= cmp.theorem1.value);
    }

    #[test]
    fn comparison_reports_y_bar_near_the_limit() {
        let h = 3.0;
        let l = 1.0;
        let v = 0.99 * h / (6.0 * l);
        let k = constants(h, l, 0.5, 1.0, 0.0, v);
        let cmp = bound_comparison(&k, v, 0.0, 0.0).unwrap();
        assert_eq!(cmp.samples, 100);
        let y = cmp.y_bar.expect("y_bar exists");
        assert!(y > 0.0 && y < cmp.y_upper);
        assert!(cmp.corollary1.e_lower * (1.0 - y) < h / (6.0 * l));
        assert!(cmp.tightness_holds > 0);
    }
}
