use etdrk4rdp::harness::{linf_error, observed_order};
use etdrk4rdp::rational::{defining_function, eval_rdp, eval_rdp_pf, stage_weights, WeightFamily};
use etdrk4rdp::stepper::{step_count, NoReaction, State, StepperWorkspace, TimeStepper};
use etdrk4rdp::{Factorization, SparseMatrix};
use proptest::prelude::*;

fn sparse_system() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..25).prop_flat_map(|n| {
        let entries = prop::collection::vec((0..n, 0..n, -1.0f64..1.0), 0..4 * n);
        (Just(n), entries)
    })
}

/// Diagonally dominant matrix with the given off-diagonal entries.
fn dominant(n: usize, off: &[(usize, usize, f64)]) -> SparseMatrix {
    let mut t: Vec<(usize, usize, f64)> = off.iter().filter(|e| e.0 != e.1).copied().collect();
    let mut row_abs = vec![0.0; n];
    for &(i, _, v) in &t {
        row_abs[i] += f64::abs(v);
    }
    for (i, r) in row_abs.iter().enumerate() {
        t.push((i, i, 1.0 + r));
    }
    SparseMatrix::from_triplets(n, n, &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matvec_matches_dense((n, off) in sparse_system(), seed in 0u64..1000) {
        let a = dominant(n, &off);
        let dense = a.to_dense();
        let x: Vec<f64> = (0..n).map(|i| ((i as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
        let y = a.matvec(&x).unwrap();
        for i in 0..n {
            let want: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
            prop_assert!((y[i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn lu_residual_is_small((n, off) in sparse_system()) {
        let a = dominant(n, &off);
        let lu = Factorization::new(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = lu.solve(&b).unwrap();
        let r = a.matvec(&x).unwrap();
        prop_assert!(linf_error(&r, &b).unwrap() <= 1e-12);
    }

    #[test]
    fn transpose_is_an_involution((n, off) in sparse_system()) {
        let a = dominant(n, &off);
        prop_assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn sixteenfold_drop_is_fourth_order(e in 1e-300f64..1e300) {
        prop_assert_eq!(observed_order(e, e / 16.0), Some(4.0));
    }

    #[test]
    fn linf_is_symmetric(u in prop::collection::vec(-1e6f64..1e6, 0..40)) {
        let v: Vec<f64> = u.iter().map(|x| x * 0.5 + 1.0).collect();
        prop_assert_eq!(linf_error(&u, &v).unwrap(), linf_error(&v, &u).unwrap());
    }

    #[test]
    fn integer_step_counts_tile(n in 1usize..5000, k in 1e-4f64..1.0) {
        prop_assert_eq!(step_count(n as f64 * k, k).unwrap(), n);
    }

    #[test]
    fn product_and_partial_fractions_agree(z in 0.0f64..100.0) {
        let p = eval_rdp(z);
        prop_assert!((p - eval_rdp_pf(z)).abs() <= 1e-10 * p.abs().max(1e-3));
    }

    #[test]
    fn rational_function_is_bounded(z in 0.0f64..1e8) {
        prop_assert!(eval_rdp(z).abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn partial_fraction_identities_hold_between_sample_points(x in 0.1f64..50.0, k in 1e-3f64..1.0) {
        let w = stage_weights(k).unwrap();
        for family in [WeightFamily::HalfStep, WeightFamily::P1, WeightFamily::P2, WeightFamily::P3] {
            let got = w.partial_fraction_sum(family, x);
            let want = defining_function(family, x);
            prop_assert!((got - want).abs() <= 1e-9 * want.abs(), "{} at {}: {} vs {}", family, x, got, want);
        }
    }

    #[test]
    fn pure_decay_never_grows(diag in prop::collection::vec(0.0f64..1e7, 1..10), k in 1e-3f64..10.0) {
        let a = SparseMatrix::diagonal(&diag);
        let ws = StepperWorkspace::setup(&a, k).unwrap();
        let out = ws.step(&State::new(vec![1.0; diag.len()], 0.0), &NoReaction).unwrap();
        prop_assert!(out.u.iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }
}
