//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to stderr so they show without `--nocapture`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use onm_cli::load_config;
use onm_core::analysis::corollary1_bound;
use onm_core::experiment::{run_experiment, AlgorithmKind, Execution, ExperimentReport};
use onm_core::verify::{run_verify, Suite, VerifyReport, VerifySettings};

const BOUND_SLACK: f64 = 1e-6;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn report_line(id: usize, name: &str, v: &Verdict, elapsed: Duration) -> String {
    let status = if v.passed { "PASS" } else { "FAIL" };
    format!("[{status}] {id:>2}. {name} ({:.2} s): {}", elapsed.as_secs_f64(), v.detail)
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn suite_verdict(report: &VerifyReport, min_instances: usize, limit: Option<Duration>, elapsed: Duration) -> Verdict {
    let props: Vec<_> = report.properties().collect();
    let enough = props.iter().all(|p| p.instances >= min_instances);
    let in_time = limit.is_none_or(|l| elapsed < l);
    let summary: Vec<String> = props
        .iter()
        .map(|p| {
            let margin = p.worst_margin.map_or_else(|| "n/a".into(), |m| format!("{m:.2e}"));
            format!("{} n={} skipped={} violations={} worst={margin}", p.property, p.instances, p.skipped, p.violations)
        })
        .collect();
    verdict(report.passed() && enough && in_time, summary.join("; "))
}

fn criterion_4(reports: &[&ExperimentReport]) -> Verdict {
    let mut evaluated = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for rep in reports.iter().flat_map(|r| r.complete()) {
        let Some(run) = rep.run(AlgorithmKind::Onm) else { continue };
        let ledger = &run.ledger;
        let (Some(bound), Some(checklist)) = (ledger.theorem1_bound, &ledger.checklist) else { continue };
        if !checklist.all_hold() {
            continue;
        }
        evaluated += 1;
        worst = worst.min(bound + BOUND_SLACK - ledger.regret);
        if ledger.regret > bound + BOUND_SLACK {
            violations += 1;
        }
    }
    verdict(
        evaluated > 0 && violations == 0,
        format!("{evaluated} runs with a passing checklist, {violations} violations, smallest headroom {worst:.3e}"),
    )
}

fn criterion_5(report: &ExperimentReport) -> Verdict {
    let mut applicable = 0;
    let mut violations = 0;
    for rep in report.complete() {
        let (Some(run), Some(k)) = (rep.run(AlgorithmKind::Onm), &rep.constants) else { continue };
        let ledger = &run.ledger;
        let Ok(bound) = corollary1_bound(k, ledger.initial_error()) else { continue };
        applicable += 1;
        let prefix_ok = ledger.prefix_error_sums().iter().all(|&e| e <= bound.e_lower + BOUND_SLACK);
        if ledger.regret > bound.value + BOUND_SLACK || !prefix_ok {
            violations += 1;
        }
    }
    verdict(
        applicable > 0 && violations == 0,
        format!("{applicable} of {} replications satisfy V_bar + e0 <= h/6L, {violations} violations", report.completed),
    )
}

/// `regret(t) / t` strictly decreasing for `t` in `[T/2, T]`.
fn sublinear(curve: &[f64]) -> bool {
    let horizon = curve.len() - 1;
    (horizon / 2..horizon).all(|t| curve[t + 1] / ((t + 1) as f64) < curve[t] / (t as f64))
}

fn criterion_6(report: &ExperimentReport, elapsed: Duration) -> Verdict {
    let cfg = &report.config;
    let onm = report.summary(AlgorithmKind::Onm).unwrap();
    let ogd = report.summary(AlgorithmKind::Ogd).unwrap();
    let lower = onm.final_regret_mean < ogd.final_regret_mean;
    let onm_sub = sublinear(&report.curves[&AlgorithmKind::Onm].mean);
    let ogd_sub = sublinear(&report.curves[&AlgorithmKind::Ogd].mean);
    let limit = 10.0 * cfg.sigma_w;
    let finals: Vec<f64> = report
        .complete()
        .filter_map(|r| r.run(AlgorithmKind::Onm)?.ledger.records.last()?.tracking_error())
        .collect();
    let close = finals.iter().filter(|&&d| d < limit).count() as f64 / finals.len().max(1) as f64;
    let shape = cfg.horizon == 500 && cfg.replications == 200 && report.completed == 200;
    let fast = elapsed < Duration::from_secs(120);
    verdict(
        shape && lower && onm_sub && ogd_sub && close >= 0.95 && fast,
        format!(
            "T = {}, {} complete; regret onm {:.4e} vs ogd {:.4e}; sublinear onm {onm_sub} ogd {ogd_sub}; \
             final error < {limit:e} in {:.1}%",
            cfg.horizon,
            report.completed,
            onm.final_regret_mean,
            ogd.final_regret_mean,
            100.0 * close
        ),
    )
}

fn criterion_7(report: &ExperimentReport) -> Verdict {
    let curve = &report.curves[&AlgorithmKind::Onm].mean;
    let horizon = report.config.horizon;
    let (end, half) = (curve[horizon], curve[horizon / 2]);
    let flat = end - half <= 0.05 * end.max(1e-12);
    let worst_tail = report
        .complete()
        .filter_map(|r| r.run(AlgorithmKind::Onm))
        .flat_map(|r| r.ledger.records[r.ledger.records.len().saturating_sub(10)..].iter())
        .filter_map(|r| r.tracking_error())
        .fold(0.0, f64::max);
    verdict(
        horizon == 500 && flat && worst_tail <= 1e-4,
        format!(
            "regret(T) - regret(T/2) = {:.3e} against {:.3e}; worst tracking error over the last 10 rounds {worst_tail:.3e}",
            end - half,
            0.05 * end.max(1e-12)
        ),
    )
}

fn run_cli(cfg: &Path, out: &Path, threads: &str) -> Result<Vec<Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_onm"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .args(["--replications", "16", "--threads", threads])
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    ["regret.csv", "trajectory.csv", "summary.json", "manifest.json"]
        .iter()
        .map(|f| fs::read(out.join(f)).map_err(|e| e.to_string()))
        .collect()
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = shipped("experiment_a.json");
    let runs: Result<Vec<_>, String> = ["1", "1", "8"].iter().map(|t| run_cli(&cfg, &out, t)).collect();
    match runs {
        Ok(r) => {
            let repeat = r[0] == r[1];
            let parallel = r[0] == r[2];
            let bytes: usize = r[0].iter().map(Vec::len).sum();
            verdict(
                repeat && parallel,
                format!("rerun identical {repeat}, threads 8 vs 1 identical {parallel} ({bytes} bytes compared)"),
            )
        }
        Err(e) => verdict(false, e),
    }
}

#[test]
fn acceptance_criteria() {
    let settings = VerifySettings::default();
    let mut lines = Vec::new();
    let mut all = true;
    let mut emit = |id: usize, name: &str, v: Verdict, elapsed: Duration| {
        all &= v.passed;
        let line = report_line(id, name, &v, elapsed);
        let _ = writeln!(std::io::stderr(), "{line}");
        lines.push(line);
    };

    let (r, t) = timed(|| run_verify(Suite::Lemma2, &settings));
    emit(1, "Newton contraction inside the basin", suite_verdict(&r, 500, Some(Duration::from_secs(30)), t), t);

    let (r, t) = timed(|| run_verify(Suite::Lemma3, &settings));
    let v = suite_verdict(&r, 200, None, t);
    emit(2, "basin retention under bounded motion (T = 100)", v, t);

    let (r, t) = timed(|| run_verify(Suite::Lemma4, &settings));
    emit(3, "quadratic-map convergence", suite_verdict(&r, 1, Some(Duration::from_secs(5)), t), t);

    let config_a = load_config(&shipped("experiment_a.json"), None, None).unwrap();
    let (report_a, time_a) = timed(|| run_experiment(&config_a, Execution::Parallel { threads: 0 }).unwrap());
    let config_b = load_config(&shipped("experiment_b.json"), None, None).unwrap();
    let (report_b, time_b) = timed(|| run_experiment(&config_b, Execution::Parallel { threads: 0 }).unwrap());

    let (v, t) = timed(|| criterion_4(&[&report_a, &report_b]));
    emit(4, "general bound dominates realized regret", v, t);
    let (v, t) = timed(|| criterion_5(&report_b));
    emit(5, "constant bound and prefix error sums", v, t);
    emit(6, "experiment_a reproduction", criterion_6(&report_a, time_a), time_a);
    emit(7, "experiment_b reproduction", criterion_7(&report_b), time_b);

    let (r, t) = timed(|| run_verify(Suite::Newton, &settings));
    emit(8, "Newton quadratic exactness and affine covariance", suite_verdict(&r, 100, None, t), t);

    let (r, t) = timed(|| run_verify(Suite::Derivatives, &settings));
    emit(9, "finite-difference derivative checks", suite_verdict(&r, 100, None, t), t);

    let (v, t) = timed(criterion_10);
    emit(10, "byte-identical reruns, serial and parallel", v, t);

    assert!(all, "failing criteria:\n{}", lines.iter().filter(|l| l.starts_with("[FAIL]")).cloned().collect::<Vec<_>>().join("\n"));
}
