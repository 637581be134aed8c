use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use onm_core::verify::{run_verify, Suite, VerifyReport, VerifySettings};

use crate::{CliError, VerifyArgs};

pub const VERIFY_FILE: &str = "verify.json";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyFile {
    #[serde(default)]
    suite: Option<Suite>,
    #[serde(default)]
    settings: VerifySettings,
}

/// Resolves the suite and settings from the arguments and optional config.
pub fn verify_plan(args: &VerifyArgs) -> Result<(Suite, VerifySettings), CliError> {
    let file = match &args.config {
        Some(path) => read_verify_file(path)?,
        None => VerifyFile::default(),
    };
    let suite = match &args.suite {
        Some(name) => name.parse().map_err(CliError::Config)?,
        None => file.suite.unwrap_or(Suite::All),
    };
    let mut settings = file.settings;
    if let Some(seed) = args.seed {
        settings.seed = seed;
    }
    Ok((suite, settings))
}

fn read_verify_file(path: &Path) -> Result<VerifyFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Runs the suites, writes `verify.json` when asked and fails when any
/// property fails.
pub fn cmd_verify(args: &VerifyArgs) -> Result<VerifyReport, CliError> {
    let (suite, settings) = verify_plan(args)?;
    let report = run_verify(suite, &settings);
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(VERIFY_FILE);
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        fs::write(&path, json).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(report)
}

pub fn verify_digest(report: &VerifyReport) -> String {
    let mut out = format!("seed {}\n", report.seed);
    for suite in &report.suites {
        let _ = writeln!(out, "{} ({:.2} s)", suite.suite, suite.elapsed_seconds);
        for note in &suite.notes {
            let _ = writeln!(out, "  {note}");
        }
        for p in &suite.properties {
            let _ = writeln!(out, "  {p}");
            for d in &p.details {
                let _ = writeln!(out, "    {d}");
            }
        }
    }
    out
}

/// `Err` naming the failing properties, if any.
pub fn verify_outcome(report: &VerifyReport) -> Result<(), CliError> {
    let failing: Vec<String> =
        report.properties().filter(|p| !p.passed).map(|p| format!("{}::{}", p.suite, p.property)).collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failing.join(", ")))
    }
}
