//! Randomized property suites over the solver, the oracles and the
//! analysis. Every suite is seeded, so a report is reproducible.

mod basin;
mod checks;
mod instances;
mod spectral;

pub use basin::{basin_step, BasinOutcome, START_MARGIN};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::random::{stream, Stream};

/// Negative slack tolerated by the inequality checks.
pub const SLACK_TOLERANCE: f64 = 1e-9;
const MAX_DETAILS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Derivatives,
    Newton,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Lemma1, Suite::Lemma2, Suite::Lemma3, Suite::Lemma4, Suite::Derivatives, Suite::Newton];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Derivatives => "derivatives",
            Suite::Newton => "newton",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Suite::EACH.to_vec()
        } else {
            vec![self]
        }
    }

    fn id(self) -> u64 {
        Suite::EACH.iter().position(|&s| s == self).map_or(0, |i| i as u64 + 1)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of lemma1, lemma2, lemma3, lemma4, derivatives, newton, all"))
    }
}

/// Instance counts and the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub seed: u64,
    pub lemma1_matrices: usize,
    pub unit_vectors: usize,
    /// Evaluated (not skipped) starts required.
    pub lemma2_instances: usize,
    pub lemma3_instances: usize,
    pub lemma3_horizon: usize,
    pub derivative_points: usize,
    pub newton_instances: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            seed: 0x5eed_0001,
            lemma1_matrices: 100,
            unit_vectors: 1000,
            lemma2_instances: 500,
            lemma3_instances: 200,
            lemma3_horizon: 100,
            derivative_points: 100,
            newton_instances: 100,
        }
    }
}

impl VerifySettings {
    fn instance_stream(&self, suite: Suite, index: usize) -> Stream {
        stream(self.seed, (suite.id() << 32) | index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub suite: Suite,
    pub property: String,
    pub passed: bool,
    /// Instances on which the property was checked.
    pub instances: usize,
    /// Instances whose preconditions did not hold.
    pub skipped: usize,
    pub violations: usize,
    /// Smallest observed slack; non-negative (or above the tolerance) when
    /// the property holds.
    pub worst_margin: Option<f64>,
    pub details: Vec<String>,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let margin = self.worst_margin.map_or_else(|| "n/a".to_string(), |m| format!("{m:.3e}"));
        write!(
            f,
            "{status} {}::{} instances={} skipped={} violations={} worst_margin={margin}",
            self.suite, self.property, self.instances, self.skipped, self.violations
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub properties: Vec<PropertyResult>,
    /// Informational lines such as fixed points and iteration counts.
    pub notes: Vec<String>,
    pub elapsed_seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyResult> {
        self.suites.iter().flat_map(|s| &s.properties)
    }
}

/// Runs `suite` (every suite for [`Suite::All`]).
pub fn run_verify(suite: Suite, settings: &VerifySettings) -> VerifyReport {
    VerifyReport { seed: settings.seed, suites: suite.expand().into_iter().map(|s| run_suite(s, settings)).collect() }
}

fn run_suite(suite: Suite, settings: &VerifySettings) -> SuiteReport {
    let start = Instant::now();
    let (properties, notes) = match suite {
        Suite::Lemma1 => (spectral::lemma1(settings), Vec::new()),
        Suite::Lemma2 => (basin::lemma2(settings), Vec::new()),
        Suite::Lemma3 => (basin::lemma3(settings), Vec::new()),
        Suite::Lemma4 => spectral::lemma4(settings),
        Suite::Derivatives => (checks::derivatives(settings), Vec::new()),
        Suite::Newton => (checks::newton(settings), Vec::new()),
        Suite::All => unreachable!("expanded by run_verify"),
    };
    SuiteReport { suite, properties, notes, elapsed_seconds: start.elapsed().as_secs_f64() }
}

/// Accumulates one property's outcomes.
struct Tally {
    suite: Suite,
    property: &'static str,
    instances: usize,
    skipped: usize,
    violations: usize,
    worst: Option<f64>,
    details: Vec<String>,
    shortfall: bool,
}

impl Tally {
    fn new(suite: Suite, property: &'static str) -> Self {
        Tally { suite, property, instances: 0, skipped: 0, violations: 0, worst: None, details: Vec::new(), shortfall: false }
    }

    fn check(&mut self, slack: f64, holds: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        self.worst = Some(self.worst.map_or(slack, |w| w.min(slack)));
        if !holds {
            self.violation(describe());
        }
    }

    /// Slack checked against `-SLACK_TOLERANCE`.
    fn check_slack(&mut self, slack: f64, describe: impl FnOnce() -> String) {
        self.check(slack, slack >= -SLACK_TOLERANCE, describe);
    }

    fn violation(&mut self, detail: String) {
        self.violations += 1;
        if self.details.len() < MAX_DETAILS {
            self.details.push(detail);
        }
    }

    fn failed_instance(&mut self, detail: String) {
        self.instances += 1;
        self.violation(detail);
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn short_of(&mut self, wanted: usize) {
        if self.instances < wanted {
            self.shortfall = true;
            self.details.push(format!("only {} of {wanted} instances evaluated", self.instances));
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            suite: self.suite,
            property: self.property.to_string(),
            passed: self.violations == 0 && self.instances > 0 && !self.shortfall,
            instances: self.instances,
            skipped: self.skipped,
            violations: self.violations,
            worst_margin: self.worst,
            details: self.details,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("lemma5".parse::<Suite>().is_err());
    }

    #[test]
    fn tally_counts_violations_and_shortfall() {
        let mut t = Tally::new(Suite::Lemma1, "p");
        t.check_slack(0.5, || unreachable!());
        t.check_slack(-1e-10, || unreachable!());
        t.check_slack(-1.0, || "bad".into());
        t.skip();
        let r = t.finish();
        assert_eq!((r.instances, r.skipped, r.violations), (3, 1, 1));
        assert_eq!(r.worst_margin, Some(-1.0));
        assert!(!r.passed);

        let mut t = Tally::new(Suite::Lemma1, "p");
        t.check_slack(0.0, || unreachable!());
        t.short_of(2);
        assert!(!t.finish().passed);
    }
}
