use onm_core::experiment::{run_experiment, run_replication, AlgorithmKind, Execution, ExperimentConfig};

fn config(horizon: usize, replications: usize, sigma_w: f64, amplitude: f64) -> ExperimentConfig {
    let json = format!(
        r#"{{
            "name": "small",
            "sensors": [[0.5, 0.5], [0.0, 0.5], [0.5, 0.0]],
            "x0_star": [2.0, 1.0],
            "horizon": {horizon},
            "sigma_w": {sigma_w:e},
            "motion": {{ "kind": "general_variation", "amplitude": {amplitude:e} }},
            "replications": {replications},
            "master_seed": 11,
            "algorithms": ["onm", "ogd"]
        }}"#
    );
    serde_json::from_str(&json).unwrap()
}

#[test]
fn replications_repeat_bit_for_bit() {
    let cfg = config(30, 1, 1e-4, 0.0025);
    assert_eq!(run_replication(&cfg, 0).unwrap(), run_replication(&cfg, 0).unwrap());
}

#[test]
fn single_replication_experiment_matches_the_replication() {
    let cfg = config(30, 1, 1e-4, 0.0025);
    let report = run_experiment(&cfg, Execution::Serial).unwrap();
    let rep = run_replication(&cfg, 0).unwrap();
    assert_eq!(report.replications[0].as_ref().unwrap(), &rep);
    let onm = &report.curves[&AlgorithmKind::Onm];
    assert_eq!(onm.mean, rep.run(AlgorithmKind::Onm).unwrap().ledger.cumulative_regret());
    assert!(onm.stderr.iter().all(|&e| e == 0.0));
}

#[test]
fn doubling_replications_keeps_the_first_half() {
    let small = run_experiment(&config(20, 3, 1e-4, 0.0025), Execution::Serial).unwrap();
    let large = run_experiment(&config(20, 6, 1e-4, 0.0025), Execution::Serial).unwrap();
    assert_eq!(small.replications[..], large.replications[..3]);
}

#[test]
fn parallel_and_serial_reports_agree() {
    let cfg = config(25, 8, 1e-4, 0.0025);
    let serial = run_experiment(&cfg, Execution::Serial).unwrap();
    let parallel = run_experiment(&cfg, Execution::Parallel { threads: 8 }).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn still_noiseless_target_costs_no_regret() {
    let report = run_experiment(&config(20, 2, 0.0, 0.0), Execution::Serial).unwrap();
    assert_eq!(report.completed, 2);
    let onm = report.summary(AlgorithmKind::Onm).unwrap();
    assert!(onm.final_regret_mean.abs() < 1e-12, "{}", onm.final_regret_mean);
    assert!(onm.final_tracking_error_max < 1e-6);
}

#[test]
fn both_learners_face_the_same_losses() {
    let rep = run_replication(&config(30, 1, 1e-4, 0.0025), 0).unwrap();
    let onm = &rep.run(AlgorithmKind::Onm).unwrap().ledger.records;
    let ogd = &rep.run(AlgorithmKind::Ogd).unwrap().ledger.records;
    assert_eq!(onm.len(), 31);
    for (a, b) in onm.iter().zip(ogd) {
        assert_eq!(a.x_star, b.x_star);
        assert_eq!(a.loss_at_star, b.loss_at_star);
        assert_eq!(a.true_target, b.true_target);
    }
    // Both play x0 first.
    assert_eq!(onm[0].x, ogd[0].x);
}

#[test]
fn newton_beats_gradient_descent_on_a_short_run() {
    let report = run_experiment(&config(200, 12, 1e-4, 0.0025), Execution::Serial).unwrap();
    let onm = report.summary(AlgorithmKind::Onm).unwrap().final_regret_mean;
    let ogd = report.summary(AlgorithmKind::Ogd).unwrap().final_regret_mean;
    assert!(onm < ogd, "onm {onm:e} vs ogd {ogd:e}");
    assert_eq!(report.bounds.theorem1_violations, 0);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let mut cfg = config(10, 1, 1e-4, 0.0025);
    cfg.replications = 0;
    assert!(run_experiment(&cfg, Execution::Serial).is_err());
}
