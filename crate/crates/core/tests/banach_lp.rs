use pq_slln::banach_lp::{
    counterexample_path, lp_norm, marcus_pisier_check, rademacher_probe, LpVector, ProbeRule, ProbeSettings,
};
use pq_slln::criteria::VerdictKind;
use pq_slln::tail_models::TailModel;
use proptest::collection::btree_map;
use proptest::prelude::*;

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|m| 1.0 / m as f64).sum()
}

#[test]
fn counterexample_ratio_is_exactly_one() {
    for p in [0.5, 1.0, 1.5] {
        let path = counterexample_path(1 << 16, p, 0.5, 17).unwrap();
        assert_eq!(path.ratios.len(), 1 << 16);
        assert!(path.ratios.iter().all(|&r| r == 1.0), "p={p}");
        for &(n, w) in &path.w_dyadic {
            assert!((w - harmonic(n)).abs() <= 1e-12 * w, "n={n}");
        }
        assert_eq!(path.w_verdict.kind, VerdictKind::Diverges);
    }
}

#[test]
fn repeated_coordinate_probe_decays() {
    let settings = ProbeSettings {
        n_max: 1 << 16,
        replications: 64,
        master_seed: 4,
    };
    let rep = rademacher_probe(ProbeRule::Repeated { index: 1 }, 1.5, 0.5, settings, None).unwrap();
    let last = rep.ratio.last().unwrap();
    assert!(last.median <= 0.15, "{}", last.median);
    // W terms decay like n^{-1-1/12}: too slow to call at 2^16, but never growing
    assert_ne!(rep.w_verdict.kind, VerdictKind::Diverges);
}

#[test]
fn invalid_probes_are_rejected() {
    assert!(ProbeRule::Repeated { index: 0 }.validate().is_err());
    assert!(LpVector::zero(2.5).is_err());
    assert!(LpVector::zero(0.0).is_err());
}

#[test]
fn marcus_pisier_holds_for_pareto() {
    let m = TailModel::pareto(1.5);
    let rep = marcus_pisier_check(&m, 64, 1.2, &[1.0, 10.0, 100.0], 4000, 3, None).unwrap();
    assert!(rep.holds());
    assert!(marcus_pisier_check(&m, 64, 0.5, &[1.0], 100, 3, None).is_err());
}

fn vectors(p: f64) -> impl Strategy<Value = LpVector> {
    btree_map(0u64..64, -100.0f64..100.0, 0..12).prop_map(move |m| LpVector::from_entries(p, m).unwrap())
}

fn dense_norm(v: &LpVector) -> f64 {
    let mut dense = vec![0.0f64; 64];
    for (i, x) in v.entries() {
        dense[i as usize] = x;
    }
    dense
        .iter()
        .map(|x| x.abs().powf(v.p()))
        .sum::<f64>()
        .powf(1.0 / v.p())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn disjoint_supports_add_in_pth_power(
        p in 0.1f64..2.0,
        a in btree_map(0u64..32, -10.0f64..10.0, 0..8),
        b in btree_map(32u64..64, -10.0f64..10.0, 0..8),
    ) {
        let x = LpVector::from_entries(p, a).unwrap();
        let y = LpVector::from_entries(p, b).unwrap();
        let lhs = x.plus(&y).norm_p();
        let rhs = x.norm_p() + y.norm_p();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn norm_is_homogeneous(p in 0.1f64..2.0, c in -50.0f64..50.0, m in btree_map(0u64..64, -10.0f64..10.0, 0..12)) {
        let x = LpVector::from_entries(p, m).unwrap();
        let lhs = x.scaled(c).lp_norm();
        let rhs = c.abs() * x.lp_norm();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn matches_dense_reference(v in (0.1f64..2.0).prop_flat_map(vectors)) {
        let d = dense_norm(&v);
        prop_assert!((lp_norm(&v) - d).abs() <= 1e-12 * d.max(1e-300));
    }

    #[test]
    fn quasi_triangle_inequality(p in 0.1f64..1.0, a in vectors(0.5), b in vectors(0.5)) {
        let x = LpVector::from_entries(p, a.entries()).unwrap();
        let y = LpVector::from_entries(p, b.entries()).unwrap();
        prop_assert!(x.plus(&y).norm_p() <= (x.norm_p() + y.norm_p()) * (1.0 + 1e-12));
    }
}
