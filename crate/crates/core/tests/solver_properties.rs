mod support;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use spca::parallel::{par_gram_apply, par_matvec_t, par_threshold_accumulate};
use spca::pca::pca_fit;
use spca::{
    center_columns, objective_bl0, objective_bl1, objective_sl0, objective_sl1, recover_pattern_sl1, solve,
    solve_single_unit, Init, KernelPlan, Penalty, SolverConfig, SpcaError, StiefelPoint, Variant,
};

fn unit(p: usize, seed: u64) -> DVector<f64> {
    let g = support::gaussian(p, 1, &mut support::rng(seed));
    g.column(0) / g.norm()
}

fn variant_strategy() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objectives_match_scalar_loop(p in 1usize..8, n in 1usize..40, gamma in 0.0f64..2.0, seed in any::<u64>()) {
        let a = support::gaussian_data(p, n, &mut support::rng(seed));
        let x = unit(p, seed ^ 1);
        let l1 = support::scalar_objective(a.as_matrix(), x.as_slice(), gamma, true);
        let l0 = support::scalar_objective(a.as_matrix(), x.as_slice(), gamma, false);
        prop_assert!((objective_sl1(&a, &x, gamma).unwrap() - l1).abs() <= 1e-10 * (1.0 + l1));
        prop_assert!((objective_sl0(&a, &x, gamma).unwrap() - l0).abs() <= 1e-10 * (1.0 + l0));

        // A one-column block with unit weight is the single-unit objective.
        let point = StiefelPoint::from_unit_vector(x.clone()).unwrap();
        prop_assert!((objective_bl1(&a, &point, &[gamma], &[1.0]).unwrap() - l1).abs() <= 1e-10 * (1.0 + l1));
        prop_assert!((objective_bl0(&a, &point, &[gamma], &[1.0]).unwrap() - l0).abs() <= 1e-10 * (1.0 + l0));
    }

    #[test]
    fn every_solve_ascends_and_stays_feasible(
        variant in variant_strategy(),
        p in 2usize..12,
        n in 3usize..40,
        m in 1usize..4,
        gamma in prop::sample::select(vec![0.0, 0.01, 0.1, 0.5]),
        seed in any::<u64>(),
    ) {
        let a = support::gaussian_data(p, n, &mut support::rng(seed));
        let m = m.min(p).min(n);
        let config = SolverConfig::for_variant(variant, m, gamma).with_init(Init::MaxNormColumn);
        match solve(&a, &config) {
            Ok((z, report)) => {
                prop_assert!(report.min_increment() >= -1e-12);
                prop_assert!(report.feasibility.iter().all(|&r| r <= 1e-10));
                prop_assert_eq!(z.m(), m);
                prop_assert_eq!(z.n(), n);
                prop_assert_eq!(z.nnz_per_component(), report.nnz_per_component.clone());
                for j in 0..m {
                    let norm = z.column(j).norm();
                    prop_assert!(norm == 0.0 || (norm - 1.0).abs() <= 1e-12);
                }
            }
            Err(SpcaError::RankDeficient { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn large_gamma_gives_empty_support(p in 1usize..6, n in 1usize..20, seed in any::<u64>()) {
        let a = support::gaussian_data(p, n, &mut support::rng(seed));
        let max_norm = (0..n).map(|i| DVector::from_column_slice(a.column(i)).norm()).fold(0.0, f64::max);
        for (penalty, gamma) in [(Penalty::L1, max_norm * 1.01), (Penalty::L0, max_norm * max_norm * 1.01)] {
            let (z, report) = solve_single_unit(&a, &SolverConfig::single_unit(penalty, gamma)).unwrap();
            prop_assert!(z.support(0).is_empty());
            prop_assert_eq!(report.final_objective(), 0.0);
        }
    }

    #[test]
    fn kernels_agree_with_naive_products(p in 1usize..10, n in 1usize..600, workers in 1usize..6, chunk in 1usize..300, seed in any::<u64>()) {
        let a = support::gaussian_data(p, n, &mut support::rng(seed));
        let x = unit(p, seed ^ 2);
        let plan = KernelPlan::new(workers, chunk).unwrap();
        let corr = par_matvec_t(&a, x.as_slice(), &plan).unwrap();
        let naive = a.as_matrix().transpose() * &x;
        for (c, d) in corr.iter().zip(naive.iter()) {
            prop_assert!((c - d).abs() <= 1e-12 * (1.0 + d.abs()));
        }
        let acc = par_threshold_accumulate(&a, &corr, 0.3, Penalty::L1, &plan).unwrap();
        let weights = DVector::from_iterator(n, corr.iter().map(|&c| 2.0 * c.signum() * (c.abs() - 0.3).max(0.0)));
        let expected = a.as_matrix() * weights;
        for (g, e) in acc.iter().zip(expected.iter()) {
            prop_assert!((g - e).abs() <= 1e-10 * (1.0 + e.abs()));
        }
        let gram = par_gram_apply(&a, naive.as_slice(), &plan).unwrap();
        let expected = a.as_matrix() * &naive;
        for (g, e) in gram.iter().zip(expected.iter()) {
            prop_assert!((g - e).abs() <= 1e-10 * (1.0 + e.abs()));
        }
        let reference = par_matvec_t(&a, x.as_slice(), &KernelPlan::new(1, chunk).unwrap()).unwrap();
        prop_assert_eq!(
            corr.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            reference.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn recovered_pattern_keeps_columns_above_threshold(p in 1usize..6, n in 1usize..30, gamma in 0.0f64..1.5, seed in any::<u64>()) {
        let a = support::gaussian_data(p, n, &mut support::rng(seed));
        let x = unit(p, seed ^ 3);
        let z = recover_pattern_sl1(&a, &x, gamma).unwrap();
        let corr = a.as_matrix().transpose() * &x;
        let expected: Vec<usize> = (0..n).filter(|&i| corr[i].abs() > gamma).collect();
        prop_assert_eq!(z.support(0).to_vec(), expected);
    }
}

#[test]
fn pca_matches_svd_oracle() {
    let mut r = support::rng(11);
    let samples = support::gaussian_data(40, 7, &mut r);
    let model = pca_fit(&samples, 3).unwrap();
    let centered = center_columns(&samples);
    let (_, vecs) = support::right_singular_vectors(centered.as_matrix());
    let oracle = DMatrix::from_columns(&vecs[..3]);
    assert!(support::max_principal_angle(&model.components, &oracle) < 1e-8);
    let gram = model.components.transpose() * &model.components;
    assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-12);
}

#[test]
fn rank_collapse_reports_the_iteration() {
    // A huge threshold on the second column zeroes its gradient after the
    // first step.
    let a = support::gaussian_data(4, 10, &mut support::rng(3));
    let config = SolverConfig::for_variant(Variant::Bl1, 2, 0.0)
        .with_gamma(vec![0.0, 1e6])
        .with_init(Init::MaxNormColumn);
    match solve(&a, &config) {
        Err(SpcaError::RankDeficient {
            iteration,
            rank,
            expected,
        }) => {
            assert_eq!((iteration, rank, expected), (1, 1, 2));
        }
        other => panic!("expected a rank error, got {other:?}"),
    }
}

#[test]
fn user_supplied_start_is_respected() {
    let a = support::gaussian_data(4, 12, &mut support::rng(5));
    let x0 = StiefelPoint::from_unit_vector(unit(4, 9)).unwrap();
    let config = SolverConfig::single_unit(Penalty::L0, 0.0)
        .with_max_iter(1)
        .with_init(Init::UserSupplied(x0.clone()));
    let (_, report) = solve_single_unit(&a, &config).unwrap();
    let g = a.as_matrix() * (a.as_matrix().transpose() * x0.column(0));
    let expected = &g / g.norm();
    assert!((report.directions.column(0) - expected).norm() < 1e-12);
}
