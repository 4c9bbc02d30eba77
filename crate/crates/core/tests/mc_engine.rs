use pq_slln::criteria::VerdictKind;
use pq_slln::mc_engine::{
    etemadi_blocks, growth_verdict, run_paths, summarize, symmetrize_run, truncated_component_series,
    ExperimentConfig, GrowthSeries, Mode, SequenceSpec, Threshold,
};
use pq_slln::tail_models::{BuiltinSpec, ModelRef, SignLaw};
use proptest::prelude::*;

fn iid(spec: BuiltinSpec, p: f64, q: f64, n_max: u64, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        sequence: SequenceSpec::Iid {
            model: ModelRef::Builtin { spec, sign_law: None },
        },
        p,
        q,
        n_max,
        replications: reps,
        master_seed: seed,
        checkpoints: None,
        epsilon_grid: Vec::new(),
        mode: Mode::Plain,
    }
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let cfg = iid(BuiltinSpec::Pareto { alpha: 1.5 }, 1.2, 0.5, 4096, 24, 99);
    let one = run_paths(&cfg, Some(1)).unwrap().to_csv_string();
    for w in [2, 8] {
        assert_eq!(one, run_paths(&cfg, Some(w)).unwrap().to_csv_string());
    }
}

#[test]
fn zero_workers_is_an_error() {
    let cfg = iid(BuiltinSpec::Rademacher, 1.5, 0.5, 1024, 2, 1);
    assert!(run_paths(&cfg, Some(0)).is_err());
}

#[test]
fn symmetrized_degenerate_is_identically_zero() {
    let mut cfg = iid(BuiltinSpec::Degenerate { c: 2.0 }, 0.5, 0.5, 1024, 8, 3);
    cfg.sequence = SequenceSpec::Iid {
        model: ModelRef::Builtin {
            spec: BuiltinSpec::Degenerate { c: 2.0 },
            sign_law: Some(SignLaw::Nonnegative),
        },
    };
    let t = symmetrize_run(&cfg, None).unwrap();
    assert!(t
        .paths
        .iter()
        .flat_map(|p| &p.rows)
        .all(|r| r.s_norm == 0.0 && r.w_partial == 0.0));
}

#[test]
fn symmetrized_rademacher_has_the_convolved_law() {
    // X - X' is 0 w.p. 1/2 and +-2 w.p. 1/4 each.
    let cfg = iid(BuiltinSpec::Rademacher, 1.5, 0.5, 1024, 20_000, 5);
    let t = symmetrize_run(&cfg, None).unwrap();
    let first = t.column_at(1, |r| r.s_norm);
    assert!(first.iter().all(|&v| v == 0.0 || v == 2.0));
    let zeros = first.iter().filter(|&&v| v == 0.0).count() as f64 / first.len() as f64;
    // 4 binomial standard errors
    assert!((zeros - 0.5).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt(), "{zeros}");
}

#[test]
fn w_is_nondecreasing_along_every_path() {
    let cfg = iid(BuiltinSpec::Pareto { alpha: 0.8 }, 0.5, 0.25, 2048, 16, 11);
    let t = run_paths(&cfg, None).unwrap();
    for path in &t.paths {
        assert!(path.rows.windows(2).all(|w| w[1].w_partial >= w[0].w_partial));
    }
}

#[test]
fn block_probabilities_of_zero_and_counterexample() {
    let mut cfg = iid(BuiltinSpec::Zero, 1.5, 0.5, 4096, 8, 2);
    cfg.epsilon_grid = vec![0.5];
    let rep = etemadi_blocks(&cfg, None).unwrap();
    assert!(rep.rows.iter().all(|r| r.probability == 0.0));
    assert_eq!(rep.verdicts[0].1.kind, VerdictKind::Converges);

    // a block of n disjoint units has norm exactly n^{1/p}
    cfg.sequence = SequenceSpec::LpCounterexample;
    cfg.p = 0.5;
    let rep = etemadi_blocks(&cfg, None).unwrap();
    assert!(rep.rows.iter().all(|r| r.probability == 1.0));
    assert_eq!(rep.verdicts[0].1.kind, VerdictKind::Diverges);
}

#[test]
fn truncated_series_of_bounded_and_light_tails() {
    let mut cfg = iid(BuiltinSpec::Zero, 0.5, 0.5, 4096, 4, 1);
    cfg.mode = Mode::Truncated {
        threshold: Threshold::Quantile,
    };
    let rep = truncated_component_series(&cfg, None).unwrap();
    assert!(rep.rows.iter().all(|r| r.mean_moment == 0.0));
    assert_eq!(rep.verdict.kind, VerdictKind::Converges);

    cfg.sequence = SequenceSpec::Iid {
        model: ModelRef::Builtin {
            spec: BuiltinSpec::Pareto { alpha: 2.0 },
            sign_law: None,
        },
    };
    cfg.q = 0.25;
    cfg.replications = 64;
    let rep = truncated_component_series(&cfg, None).unwrap();
    assert_eq!(rep.verdict.kind, VerdictKind::Converges);

    // a level below every atom truncates everything
    cfg.mode = Mode::Truncated {
        threshold: Threshold::Fixed { level: 0.5 },
    };
    let rep = truncated_component_series(&cfg, None).unwrap();
    assert!(rep.rows.iter().all(|r| r.term == 0.0));
}

#[test]
fn rademacher_summary_converges() {
    let cfg = iid(BuiltinSpec::Rademacher, 1.5, 0.5, 1 << 16, 64, 8);
    let t = run_paths(&cfg, None).unwrap();
    let s = summarize(&t, &cfg);
    assert_eq!(s.w_verdict.kind, VerdictKind::Converges);
    assert_eq!(s.expectation_verdict.kind, VerdictKind::Converges);
    assert!(s.censored.is_empty());
    // CLT scale: E|S_n| / n^{2/3} ~ 0.8 n^{-1/6}
    assert!(s.final_ratio_median < 0.2);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = iid(BuiltinSpec::Rademacher, 1.5, 0.5, 1000, 4, 1);
    assert!(cfg.validate().is_err());
    cfg.n_max = 1024;
    cfg.checkpoints = Some(vec![4, 2]);
    assert!(cfg.validate().is_err());
    cfg.checkpoints = None;
    cfg.sequence = SequenceSpec::LpCounterexample;
    cfg.mode = Mode::Truncated {
        threshold: Threshold::Quantile,
    };
    assert!(cfg.validate().is_err());
    let json = r#"{"sequence":{"kind":"lp-counterexample"},"p":0.5,"q":0.5,"n_max":1024,
        "replications":2,"master_seed":1,"extra":0}"#;
    assert!(ExperimentConfig::from_json_str(json).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn geometric_decay_is_classified_convergent(
        // larger beta pushes the last increments toward the rounding level of c
        beta in 1.2f64..2.2,
        c in 0.1f64..10.0) {
        let n: Vec<u64> = (0..=20).map(|k| 1u64 << k).collect();
        let partial = n.iter().map(|&m| c * (1.0 - (m as f64).powf(1.0 - beta))).collect();
        let v = growth_verdict(&GrowthSeries::from_partials(n, partial));
        prop_assert_eq!(v.kind, VerdictKind::Converges);
        prop_assert!((v.evidence.beta - beta).abs() < 1e-6);
    }

    #[test]
    fn linear_growth_in_log_n_diverges(slope in 0.05f64..5.0) {
        let n: Vec<u64> = (0..=20).map(|k| 1u64 << k).collect();
        let partial = n.iter().map(|&m| slope * (m as f64).ln()).collect();
        let v = growth_verdict(&GrowthSeries::from_partials(n, partial));
        prop_assert_eq!(v.kind, VerdictKind::Diverges);
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>()) {
        let cfg = iid(BuiltinSpec::Pareto { alpha: 1.5 }, 1.2, 0.5, 1024, 3, seed);
        prop_assert_eq!(run_paths(&cfg, Some(1)).unwrap(), run_paths(&cfg, Some(3)).unwrap());
    }
}
