use std::fmt::Write as _;

use serde::Serialize;

use onm_core::analysis::{
    bound_comparison, corollary1_bound, theorem1_bound, AssumptionChecklist, BoundComparison, BoundError,
    Corollary1Bound, Theorem1Bound,
};
use onm_core::experiment::{run_replication, AlgorithmKind};
use onm_core::oracle::RegularityConstants;

use crate::run::load_config;
use crate::{BoundsArgs, CliError};

/// Run quantities the bounds are evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    /// `V_T`
    pub total_variation: f64,
    pub e0: f64,
    pub e_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub constants: RegularityConstants,
    pub gamma: f64,
    pub contraction: f64,
    pub inputs: BoundInputs,
    pub checklist: AssumptionChecklist,
    pub theorem1: Result<Theorem1Bound, String>,
    pub corollary1: Result<Corollary1Bound, String>,
    pub comparison: Option<BoundComparison>,
    /// Realized regret of the replication, when taken from a config.
    pub realized_regret: Option<f64>,
    #[serde(skip)]
    violation: Option<BoundError>,
}

impl BoundsReport {
    pub fn evaluate(k: RegularityConstants, inputs: BoundInputs, realized_regret: Option<f64>) -> Self {
        let BoundInputs { total_variation, e0, e_final } = inputs;
        let theorem1 = theorem1_bound(&k, total_variation, e0, e_final);
        let violation = theorem1.as_ref().err().filter(|e| e.assumption().is_some()).cloned();
        BoundsReport {
            gamma: k.gamma(),
            contraction: k.contraction(),
            inputs,
            checklist: AssumptionChecklist::evaluate(&k, e0),
            theorem1: theorem1.map_err(|e| e.to_string()),
            corollary1: corollary1_bound(&k, e0).map_err(|e| e.to_string()),
            comparison: bound_comparison(&k, total_variation, e0, e_final).ok(),
            realized_regret,
            violation,
            constants: k,
        }
    }

    /// `Err` when a hypothesis of the general bound fails outright.
    pub fn outcome(&self) -> Result<(), CliError> {
        match &self.violation {
            Some(e) => Err(CliError::Assumption(e.to_string())),
            None => Ok(()),
        }
    }
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<BoundsReport, CliError> {
    match &args.config {
        Some(path) => {
            let config = load_config(path, args.seed, None)?;
            if args.index >= config.replications {
                return Err(CliError::Config(format!(
                    "replication index {} out of range ({} replications)",
                    args.index, config.replications
                )));
            }
            let rep = run_replication(&config, args.index).map_err(|e| CliError::Runtime(e.to_string()))?;
            let k = rep.constants.clone().ok_or_else(|| {
                CliError::Runtime(rep.constants_error.as_ref().map_or_else(String::new, |e| e.to_string()))
            })?;
            let run = rep
                .run(AlgorithmKind::Onm)
                .ok_or_else(|| CliError::Config("config does not run the online Newton method".into()))?;
            if let Some(f) = &run.failure {
                return Err(CliError::Runtime(f.to_string()));
            }
            let ledger = &run.ledger;
            let inputs = BoundInputs {
                total_variation: ledger.total_variation,
                e0: ledger.initial_error(),
                e_final: ledger.final_error(),
            };
            Ok(BoundsReport::evaluate(k, inputs, Some(ledger.regret)))
        }
        None => {
            let need = |name: &str, v: Option<f64>| v.ok_or_else(|| CliError::Config(format!("--{name} is required without --config")));
            let k = RegularityConstants::new(
                need("h", args.h)?,
                need("hessian-lipschitz", args.hessian_lipschitz)?,
                need("beta", args.beta)?,
                need("value-lipschitz", args.value_lipschitz)?,
                args.max_step,
                args.max_total,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            let inputs = BoundInputs {
                total_variation: args.variation.unwrap_or(args.max_total),
                e0: args.e0,
                e_final: args.e_final.unwrap_or(args.e0),
            };
            Ok(BoundsReport::evaluate(k, inputs, None))
        }
    }
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn bounds_digest(r: &BoundsReport) -> String {
    let k = &r.constants;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "constants: h = {}, L = {}, ell = {}, beta = {}, v_bar = {}, V_bar = {}",
        e(k.h()),
        e(k.hessian_lipschitz()),
        e(k.value_lipschitz()),
        e(k.beta()),
        e(k.max_step_variation()),
        e(k.max_total_variation())
    );
    let _ = writeln!(out, "basin radius gamma = {}, contraction 3L/2h = {}", e(r.gamma), e(r.contraction));
    let _ = writeln!(
        out,
        "inputs: V_T = {}, e0 = {}, e_T = {}",
        e(r.inputs.total_variation),
        e(r.inputs.e0),
        e(r.inputs.e_final)
    );
    let _ = writeln!(out, "assumption checklist:");
    for c in &r.checklist.checks {
        let mark = if c.holds { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  [{mark}] {}: value {}, limit {}", c.assumption, e(c.value), e(c.limit));
    }
    match &r.theorem1 {
        Ok(b) => {
            let _ = writeln!(out, "general bound: {} (factor {}, delta {})", e(b.value), e(b.factor), e(b.delta));
        }
        Err(msg) => {
            let _ = writeln!(out, "general bound: not available: {msg}");
        }
    }
    match &r.corollary1 {
        Ok(b) => {
            let _ = writeln!(out, "constant bound: {} (E_lower {}, E_upper {})", e(b.value), e(b.e_lower), e(b.e_upper));
        }
        Err(msg) => {
            let _ = writeln!(out, "constant bound: not available: {msg}");
        }
    }
    if let Some(c) = &r.comparison {
        let tighter = match c.tighter {
            onm_core::analysis::Tighter::General => "general",
            onm_core::analysis::Tighter::Constant => "constant",
            onm_core::analysis::Tighter::Equal => "equal",
        };
        let y_bar = c.y_bar.map_or_else(|| "none".to_string(), e);
        let _ = writeln!(
            out,
            "tighter: {tighter}; E_lower (1 - y) < V_T + delta for {}/{} sampled y in (0, {}); y_bar = {y_bar}",
            c.tightness_holds,
            c.samples,
            e(c.y_upper)
        );
    }
    if let Some(regret) = r.realized_regret {
        let _ = writeln!(out, "realized regret: {}", e(regret));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(h: f64, l: f64, ell: f64, beta: f64, total: f64, e0: f64) -> BoundsReport {
        let k = RegularityConstants::new(h, l, beta, ell, 0.0, total).unwrap();
        BoundsReport::evaluate(k, BoundInputs { total_variation: total, e0, e_final: e0 }, None)
    }

    #[test]
    fn unit_fixture_gives_two() {
        let r = explicit(3.0, 1.0, 1.0, 1.0, 1.0, 0.0);
        assert_eq!(r.theorem1.as_ref().unwrap().value, 2.0);
        assert!(r.outcome().is_ok());
    }

    #[test]
    fn basin_edge_is_an_assumption_violation() {
        // gamma = 2h/3L = 2
        let r = explicit(3.0, 1.0, 1.0, 2.0, 1.0, 0.0);
        let err = r.outcome().unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("basin condition"));
    }
}
