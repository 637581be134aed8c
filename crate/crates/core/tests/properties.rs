use approx::assert_relative_eq;
use proptest::prelude::*;

use onm_core::algorithms::{onm_step, OnmState};
use onm_core::analysis::{compute_regret, total_variation, RoundRecord};
use onm_core::linalg::{min_singular_value, operator_norm, solve_symmetric, SymMatrix, Vector};
use onm_core::oracle::{AffineComposition, LossOracle, QuadraticLoss, RippleLoss};

fn vector(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(lo..hi, n).prop_map(|v| Vector::new(v).unwrap())
}

fn symmetric(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0..3.0f64, n * n)
        .prop_map(move |e| SymMatrix::from_upper_fn(n, |i, j| e[i * n + j]).unwrap())
}

fn sized_symmetric() -> impl Strategy<Value = SymMatrix> {
    (1usize..=5).prop_flat_map(symmetric)
}

fn matrix_and_vector() -> impl Strategy<Value = (SymMatrix, Vector)> {
    (1usize..=5).prop_flat_map(|n| (symmetric(n), vector(n, -5.0, 5.0)))
}

/// Rows of a well-conditioned square matrix `I + E` with `|E_ij| < 0.5/n`.
fn near_identity(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let bound = 0.5 / n as f64;
    prop::collection::vec(-bound..bound, n * n).prop_map(move |e| {
        (0..n).map(|i| (0..n).map(|j| e[i * n + j] + f64::from(u8::from(i == j))).collect()).collect()
    })
}

fn dyadic(steps: i32) -> impl Strategy<Value = f64> {
    (-steps..=steps).prop_map(|k| f64::from(k) / 1024.0)
}

fn dyadic_path(n: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(dyadic(4096), n), 2..20)
        .prop_map(|rows| rows.into_iter().map(|r| Vector::new(r).unwrap()).collect())
}

proptest! {
    #[test]
    fn image_norm_never_below_smallest_singular_value(
        m in sized_symmetric(),
        raw in prop::collection::vec(-1.0..1.0f64, 5),
    ) {
        let n = m.n();
        let v = Vector::new(raw[..n].to_vec()).unwrap();
        prop_assume!(v.norm() > 1e-3);
        let u = v.normalized().unwrap();
        prop_assert!(m.mul_vec(&u).norm() >= min_singular_value(&m) - 1e-9);
    }

    #[test]
    fn solve_has_small_backward_error((m, b) in matrix_and_vector()) {
        prop_assume!(min_singular_value(&m) > 1e-6 * operator_norm(&m).max(1e-300));
        let x = solve_symmetric(&m, &b).unwrap();
        let residual = (&m.mul_vec(&x) - &b).norm();
        let scale = operator_norm(&m) * x.norm() + b.norm();
        prop_assert!(residual <= 1e-12 * scale, "residual {residual:e}, scale {scale:e}");
    }

    #[test]
    fn negating_the_matrix_negates_the_solution((m, b) in matrix_and_vector()) {
        let Ok(x) = solve_symmetric(&m, &b) else { return Ok(()); };
        let y = solve_symmetric(&m.scaled(-1.0), &b).unwrap();
        prop_assert_eq!(y, -&x);
    }

    #[test]
    fn newton_step_lands_on_quadratic_minimizer(
        (spectrum, center, start) in (1usize..=5).prop_flat_map(|n| (
            prop::collection::vec(prop_oneof![0.5..3.0f64, -3.0..-0.5f64], n),
            vector(n, -2.0, 2.0),
            vector(n, -5.0, 5.0),
        )),
    ) {
        let a = SymMatrix::diagonal(&spectrum).unwrap();
        let q = QuadraticLoss::with_centers(a, std::slice::from_ref(&center)).unwrap();
        let next = onm_step(&q, &OnmState::new(start)).unwrap();
        prop_assert!(next.x.distance(&center) <= 1e-8 * center.norm().max(1.0));
    }

    #[test]
    fn newton_step_commutes_with_affine_maps(
        (s, shift, y0, wave, kappa) in (1usize..=4).prop_flat_map(|n| (
            near_identity(n),
            vector(n, -1.0, 1.0),
            vector(n, -1.0, 1.0),
            vector(n, -1.0, 1.0),
            0.05..0.3f64,
        )),
    ) {
        let n = y0.len();
        let f = RippleLoss::new(SymMatrix::identity(n).scaled(2.0), kappa, vec![wave], vec![Vector::zeros(n)]).unwrap();
        let g = AffineComposition::new(&f, s, shift).unwrap();
        let x0 = g.map(&y0);
        let h = f.hessian(0, &x0).unwrap();
        prop_assume!(min_singular_value(&h) > 0.1);
        let direct = onm_step(&f, &OnmState::new(x0)).unwrap().x;
        let pulled = g.map(&onm_step(&g, &OnmState::new(y0)).unwrap().x);
        prop_assert!(direct.distance(&pulled) <= 1e-8 * direct.norm().max(1.0));
    }

    #[test]
    fn regret_and_variation_are_additive(
        gaps in prop::collection::vec((dyadic(1024), dyadic(1024)), 1..30),
        split in 0usize..30,
        path in dyadic_path(2),
    ) {
        let records: Vec<RoundRecord> = gaps
            .iter()
            .enumerate()
            .map(|(t, &(fx, fs))| RoundRecord::new(t, Vector::zeros(1), Vector::zeros(1), fx, fs, None))
            .collect();
        let k = split.min(records.len());
        assert_relative_eq!(
            compute_regret(&records),
            compute_regret(&records[..k]) + compute_regret(&records[k..]),
            epsilon = 1e-12
        );

        let cut = split % path.len();
        assert_relative_eq!(
            total_variation(&path),
            total_variation(&path[..=cut]) + total_variation(&path[cut..]),
            epsilon = 1e-12
        );
    }

    #[test]
    fn variation_and_regret_ignore_translation(
        path in dyadic_path(2),
        shift in prop::collection::vec(dyadic(4096), 2),
        offset in dyadic(1024),
        gaps in prop::collection::vec((dyadic(1024), dyadic(1024)), 1..30),
    ) {
        let shift = Vector::new(shift).unwrap();
        let moved: Vec<Vector> = path.iter().map(|p| p + &shift).collect();
        prop_assert_eq!(total_variation(&moved), total_variation(&path));

        let record = |t, fx: f64, fs: f64| RoundRecord::new(t, Vector::zeros(1), Vector::zeros(1), fx, fs, None);
        let base: Vec<_> = gaps.iter().enumerate().map(|(t, &(fx, fs))| record(t, fx, fs)).collect();
        let lifted: Vec<_> = gaps.iter().enumerate().map(|(t, &(fx, fs))| record(t, fx + offset, fs + offset)).collect();
        prop_assert_eq!(compute_regret(&lifted), compute_regret(&base));
    }
}
