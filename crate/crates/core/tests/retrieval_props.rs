use proptest::prelude::*;

use prlab_core::frame::{canonicalize_sign, random_frame, Frame};
use prlab_core::phaseless::{l0_oracle_solutions, random_sparse_vector, PhaselessProblem};
use prlab_core::retrieval::{
    collide_below_2k, is_full_pr_real, is_k_sparse_pr_real, minimal_measurement_bound, FieldKind,
};
use prlab_core::rng::SeededRng;
use prlab_core::scalar::support_size;
use prlab_core::Rational;

/// Small integer frames; bound 1 makes degenerate frames common.
fn small_frame(max_d: usize, max_m: usize) -> impl Strategy<Value = Frame<Rational>> {
    (1usize..=max_d, 1usize..=max_m, any::<u64>(), 1i64..=3)
        .prop_map(|(d, m, seed, bound)| random_frame(d, m, seed, bound).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_sparsity_is_full_retrievability(f in small_frame(3, 5)) {
        let sparse = is_k_sparse_pr_real(&f, f.d()).unwrap();
        let full = is_full_pr_real(&f).unwrap();
        prop_assert_eq!(sparse.verdict, full.verdict);
        for r in [&sparse, &full] {
            prop_assert_eq!(r.witness.is_some(), !r.is_retrievable());
            if let Some(w) = &r.witness {
                w.validate(&f).unwrap();
            }
        }
    }

    #[test]
    fn retrievability_is_monotone_in_k(f in small_frame(4, 6)) {
        let verdicts: Vec<bool> = (1..=f.d())
            .map(|k| is_k_sparse_pr_real(&f, k).unwrap().is_retrievable())
            .collect();
        for pair in verdicts.windows(2) {
            prop_assert!(pair[0] || !pair[1], "retrievable at k+1 but not at k: {verdicts:?}");
        }
    }

    #[test]
    fn verdict_agrees_with_l0_oracle(f in small_frame(4, 6), k in 1usize..=2, seed in any::<u64>()) {
        let k = k.min(f.d());
        let report = is_k_sparse_pr_real(&f, k).unwrap();
        match &report.witness {
            None => {
                let mut rng = SeededRng::new(seed);
                for _ in 0..100 {
                    let x0: Vec<Rational> = random_sparse_vector(&mut rng, f.d(), k, 20);
                    let p = PhaselessProblem::from_signal(f.clone(), &x0).unwrap();
                    let o = l0_oracle_solutions(&p, k).unwrap();
                    prop_assert!(o.families.is_empty());
                    prop_assert_eq!(o.classes, vec![canonicalize_sign(&x0)]);
                }
            }
            Some(w) => {
                w.validate(&f).unwrap();
                let p = PhaselessProblem::from_signal(f.clone(), &w.x).unwrap();
                let o = l0_oracle_solutions(&p, k).unwrap();
                prop_assert!(o.contains(&f, &w.x));
                prop_assert!(o.contains(&f, &w.y));
            }
        }
    }

    #[test]
    fn below_threshold_collisions_validate(d in 2usize..=6, seed in any::<u64>(), k_off in 0usize..3, m_off in 1usize..4) {
        let k = (1 + k_off).min(d - 1);
        let m = (2 * k).saturating_sub(m_off).max(1);
        let f: Frame<Rational> = random_frame(d, m, seed, 1000).unwrap();
        let w = collide_below_2k(&f, k).unwrap();
        w.validate(&f).unwrap();
        prop_assert_eq!(f.measure_abs(&w.x).unwrap(), f.measure_abs(&w.y).unwrap());
        prop_assert!(support_size(&w.x) <= k && support_size(&w.y) <= k);
        prop_assert!(!is_k_sparse_pr_real(&f, k).unwrap().is_retrievable());
    }
}

#[test]
fn generic_frames_meet_the_bound() {
    for seed in 0..5 {
        let f: Frame<Rational> = random_frame(5, 4, seed, 1000).unwrap();
        assert!(is_k_sparse_pr_real(&f, 2).unwrap().is_retrievable());
        let g: Frame<Rational> = random_frame(5, 3, seed, 1000).unwrap();
        assert!(!is_k_sparse_pr_real(&g, 2).unwrap().is_retrievable());
    }
    assert_eq!(
        minimal_measurement_bound(2, 5, FieldKind::Real)
            .unwrap()
            .bound,
        4
    );
    assert_eq!(
        minimal_measurement_bound(3, 4, FieldKind::Real)
            .unwrap()
            .bound,
        6
    );
    assert_eq!(
        minimal_measurement_bound(4, 4, FieldKind::Real)
            .unwrap()
            .bound,
        7
    );
}

#[test]
fn preconditions_are_errors() {
    let f = Frame::<Rational>::identity(3);
    assert!(collide_below_2k(&f, 1).is_err()); // m >= 2k
    assert!(collide_below_2k(&f, 3).is_err()); // k = d
    assert!(is_k_sparse_pr_real(&f, 0).is_err());
    assert!(is_k_sparse_pr_real(&f, 4).is_err());
}
