use onm_core::verify::{run_verify, Suite, VerifySettings};

#[test]
fn every_suite_passes_at_default_settings() {
    let report = run_verify(Suite::All, &VerifySettings::default());
    for suite in &report.suites {
        println!("{} ({:.2} s)", suite.suite, suite.elapsed_seconds);
        for note in &suite.notes {
            println!("  {note}");
        }
        for p in &suite.properties {
            println!("  {p}");
            for d in &p.details {
                println!("    {d}");
            }
        }
    }
    assert!(report.passed());
}

#[test]
fn lemma2_reports_outside_starts_as_skipped() {
    let settings = VerifySettings { lemma2_instances: 40, ..VerifySettings::default() };
    let report = run_verify(Suite::Lemma2, &settings);
    for p in report.properties() {
        assert!(p.passed, "{p}");
        assert!(p.instances >= 40);
        assert!(p.skipped > 0);
        assert_eq!(p.violations, 0);
    }
}

#[test]
fn reports_repeat_for_a_seed() {
    let settings = VerifySettings { seed: 99, lemma3_instances: 10, ..VerifySettings::default() };
    let a = run_verify(Suite::Lemma3, &settings);
    let b = run_verify(Suite::Lemma3, &settings);
    assert_eq!(a.suites[0].properties, b.suites[0].properties);
}
