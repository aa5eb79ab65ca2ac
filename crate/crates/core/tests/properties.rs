//! Property tests over randomly shaped inputs.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blocksvd::approx::{algorithm2, synthetic_sparse, SyntheticSpec};
use blocksvd::blockdiag::{block_diagonalize, BlockDiagOptions};
use blocksvd::bounds::{mu_bounds, small_rank_bounds, weyl_gap_bounds};
use blocksvd::givens::{build_left_rotation, build_right_rotation, Side};
use blocksvd::io::{format_matrix_market, parse_matrix_market};
use blocksvd::matcore::{psd_apply, singular_values};
use blocksvd::plan::plan_partition;
use blocksvd::randmat::{moment_ratio, ColumnModel};
use blocksvd::{BlockPartition, Matrix};

fn dense(seed: u64, m: usize, n: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

fn sparse_nonneg(seed: u64, m: usize, n: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(m, n, |_, _| if rng.random_bool(0.3) { rng.random_range(0.0..5.0) } else { 0.0 })
}

fn reference_sv(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn norm2(m: &Matrix) -> f64 {
    reference_sv(m).first().copied().unwrap_or(0.0)
}

/// Tall shape `(m, n, k)` with `1 <= k < n <= m`.
fn partition_shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..16).prop_flat_map(|n| (n..n + 12, Just(n), 1..n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_market_round_trip_is_bitwise(seed in any::<u64>(), m in 1usize..12, n in 1usize..12) {
        let mut a = dense(seed, m, n);
        a[(0, 0)] = 0.0;
        let back = parse_matrix_market(&format_matrix_market(&a)).unwrap();
        prop_assert_eq!(back.shape(), a.shape());
        for (x, y) in a.iter().zip(back.iter()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn singular_values_match_reference(seed in any::<u64>(), m in 1usize..20, n in 1usize..20) {
        let a = dense(seed, m, n);
        let ours = singular_values(&a).unwrap();
        let theirs = reference_sv(&a);
        prop_assert_eq!(ours.len(), theirs.len());
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() <= 1e-12 * theirs[0].max(1.0));
        }
    }

    #[test]
    fn decreasing_function_reverses_eigen_order(seed in any::<u64>(), s in 1usize..8) {
        let x = dense(seed, s + 3, s);
        let psd = x.transpose() * &x;
        let g = |t: f64| 1.0 / (1.0 + t.max(0.0)).sqrt();
        let image = psd_apply(g, &psd).unwrap();
        let mut got: Vec<f64> = SymmetricEigen::new(image).eigenvalues.iter().copied().collect();
        got.sort_by(|a, b| b.total_cmp(a));
        let mut ev: Vec<f64> = SymmetricEigen::new(psd).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, t) in got.iter().zip(&ev) {
            prop_assert!((a - g(*t)).abs() <= 1e-10);
        }
    }

    #[test]
    fn weyl_perturbation(seed in any::<u64>(), m in 1usize..15, n in 1usize..15, scale in 0.0f64..2.0) {
        let a = dense(seed, m, n);
        let e = dense(seed ^ 0x9e37, m, n) * scale;
        let sa = singular_values(&a).unwrap();
        let sb = singular_values(&(&a + &e)).unwrap();
        let bound = norm2(&e);
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((x - y).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn rotations_are_orthogonal_and_annihilate((m, n, k) in partition_shape(), seed in any::<u64>()) {
        let r = dense(seed, m, n);
        let p = BlockPartition::new(r.clone(), k).unwrap();
        let scale = norm2(&r);
        if let Ok(g) = build_right_rotation(&p) {
            prop_assert_eq!(g.side(), Side::Right);
            let q = g.matrix();
            prop_assert!(norm2(&(q.transpose() * &q - Matrix::identity(n, n))) <= 1e-11 * n as f64);
            let out = &r * &q;
            prop_assert!(norm2(&out.view((0, k), (k, n - k)).into_owned()) <= 1e-10 * scale);
            let applied = g.apply(&r).unwrap();
            prop_assert!(norm2(&(applied - out)) <= 1e-12 * scale * n as f64);
        }
        if let Ok(g) = build_left_rotation(&p) {
            let q = g.matrix();
            prop_assert!(norm2(&(q.transpose() * &q - Matrix::identity(m, m))) <= 1e-11 * m as f64);
            let out = &q * &r;
            prop_assert!(norm2(&out.view((k, 0), (m - k, k)).into_owned()) <= 1e-10 * scale);
        }
    }

    #[test]
    fn block_diagonalization_preserves_spectrum((m, n, k) in partition_shape(), seed in any::<u64>()) {
        let mut r = dense(seed, m, n);
        r.columns_mut(0, k).scale_mut(10.0);
        let p = BlockPartition::new(r.clone(), k).unwrap();
        let res = block_diagonalize(&p, &BlockDiagOptions::default()).unwrap();
        prop_assume!(res.converged());
        let scale = norm2(&r);
        let mut got = reference_sv(&res.a_inf());
        got.extend(reference_sv(&res.d_inf()));
        got.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in got.iter().zip(reference_sv(&r)) {
            prop_assert!((x - y).abs() <= 1e-9 * scale);
        }
        let back = res.reconstruct().unwrap();
        prop_assert!(norm2(&(back - &r)) <= 1e-9 * scale);
    }

    #[test]
    fn perturbation_bounds_contain_oracle((m, n, k) in partition_shape(), seed in any::<u64>(), i_frac in 0.0f64..1.0) {
        let r = dense(seed, m, n);
        let i = 1 + ((n - 1) as f64 * i_frac) as usize;
        let p = BlockPartition::new(r, k).unwrap();
        let mut reports = weyl_gap_bounds(&p, i).unwrap();
        reports.extend(small_rank_bounds(&p, i).unwrap());
        let (mu, more) = mu_bounds(&p, i).unwrap();
        reports.extend(more);
        for b in &reports {
            prop_assert!(b.holds(1e-10), "{:?}", b);
        }
        prop_assert!(mu.mu_bar <= norm2(&p.d()) + 1e-12);
    }

    #[test]
    fn plan_is_idempotent(seed in any::<u64>(), m in 4usize..30, n in 2usize..12, alpha in 0.1f64..10.0) {
        let r = sparse_nonneg(seed, m.max(n), n);
        let plan = plan_partition(&r, None, alpha).unwrap();
        prop_assert!(plan.feasibility_index < plan.k);
        prop_assert!(plan.k >= 1 && plan.k < n);
        let sorted = plan.apply(&r).unwrap();
        let again = plan_partition(&sorted, Some(plan.k), alpha).unwrap();
        prop_assert!(again.is_identity());
        prop_assert_eq!(again.feasibility_index, plan.feasibility_index);
    }

    #[test]
    fn sampled_columns_have_exact_size(seed in any::<u64>(), m in 2usize..40, frac in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = 1 + ((m - 1) as f64 * frac) as usize;
        let x = ColumnModel::Binary { l }.sample(m, &mut rng).unwrap();
        prop_assert_eq!(x.iter().sum::<f64>(), l as f64);
        let s = 0.5 + 10.0 * frac;
        let y = ColumnModel::FixedSize { s }.sample(m, &mut rng).unwrap();
        prop_assert!((y.iter().sum::<f64>() - s).abs() <= 1e-12 * s);
        prop_assert!(y.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn moment_ratio_is_at_least_one(values in prop::collection::vec(0.01f64..100.0, 1..50)) {
        let rho = moment_ratio(&values).unwrap();
        prop_assert!(rho >= 1.0 - 1e-12);
        prop_assert!(rho <= (values.len() as f64).sqrt() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn low_rank_certificate(seed in any::<u64>(), ratio in 0.0f64..0.05, rank in 1usize..6) {
        let spec = SyntheticSpec::new(80, 30, 8, ratio);
        let r = synthetic_sparse(&spec, seed).unwrap();
        let rep = algorithm2(&r, 8, rank, &BlockDiagOptions::default(), false).unwrap();
        let exact = reference_sv(&r);
        let d = norm2(&r.view((8, 8), (72, 22)).into_owned());
        for (j, v) in rep.singular_values.iter().enumerate() {
            prop_assert!((exact[j] - v).abs() <= 2.0 * d + 1e-9 * exact[0]);
        }
    }
}
