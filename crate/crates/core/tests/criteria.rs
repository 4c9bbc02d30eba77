use pq_slln::criteria::{
    classify_slln, integral_pq, llogl_moment, p_moment, series_expectation_criterion, truncated_series,
    CriteriaOptions, Membership, VerdictKind,
};
use pq_slln::tail_models::{Clause, SignLaw, TailModel};

fn opts() -> CriteriaOptions {
    CriteriaOptions::default()
}

#[test]
fn integral_of_degenerate_is_c_to_the_q() {
    let v = integral_pq(&TailModel::degenerate(2.5), 0.8, 0.4, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Converges);
    assert!((v.estimate_on_window - 2.5f64.powf(0.4)).abs() < 1e-9);
    assert_eq!(v.remainder_bound, Some(0.0));
}

#[test]
fn pareto_integral_matches_antiderivative() {
    // int_0^1 dt + int_1^inf t^{-alpha/p} dt = 1 + p/(alpha - p)
    let v = integral_pq(&TailModel::pareto(2.0), 1.0, 0.5, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Converges);
    assert!(
        (v.estimate_on_window - 2.0).abs() < 1e-6,
        "{}",
        v.estimate_on_window
    );
    let v = integral_pq(&TailModel::pareto(3.0), 1.5, 0.7, &opts()).unwrap();
    assert!((v.estimate_on_window - 2.0).abs() < 1e-6);
    assert!((v.evidence.beta - 2.0).abs() < 1e-6);
}

#[test]
fn log_squared_integral_diverges_below_p() {
    for (p, q) in [(0.5, 0.25), (0.5, 0.4), (0.9, 0.45)] {
        let v = integral_pq(&TailModel::log_squared(p, q), p, q, &opts()).unwrap();
        assert_eq!(v.kind, VerdictKind::Diverges, "p={p} q={q}");
        assert!(v.partial_slope > 0.0);
        assert!(v.remainder_bound.is_none());
    }
}

#[test]
fn p_moment_examples() {
    let v = p_moment(&TailModel::log_loglog(0.5), 0.5, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Converges);
    assert!(v.remainder_bound.unwrap().is_finite());
    let v = p_moment(&TailModel::critical_power(0.5), 0.5, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Diverges);
    // t^-1 exactly: beta = 1 and lambda = 0 put the edge fit in the divergent branch.
    assert_eq!(v.evidence.numeric_kind, VerdictKind::Diverges);
    let v = p_moment(&TailModel::degenerate(1.0), 0.7, &opts()).unwrap();
    assert!((v.estimate_on_window - 1.0).abs() < 1e-12);
}

#[test]
fn llogl_examples() {
    let p = 0.6;
    let v = llogl_moment(&TailModel::log_squared(p, p), p, 0.5, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Converges);
    let v = llogl_moment(&TailModel::log_squared(p, p), p, 1.0, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Diverges);
    let v = llogl_moment(&TailModel::degenerate(1.0), 0.5, 2.0, &opts()).unwrap();
    assert!((v.estimate_on_window - 2f64.ln().powi(2)).abs() < 1e-9);
    // Pareto with p < alpha is dominated by a higher moment.
    let v = llogl_moment(&TailModel::pareto(1.5), 1.0, 1.0, &opts()).unwrap();
    assert_eq!(v.kind, VerdictKind::Converges);
    let oracle = integral_pq(&TailModel::pareto(1.5), 1.2, 1.2, &opts()).unwrap();
    assert_eq!(oracle.kind, VerdictKind::Converges);
}

#[test]
fn truncated_series_examples() {
    let o = opts();
    let s = truncated_series(&TailModel::critical_power(0.5), 0.5, 10_000, &o).unwrap();
    assert!(s.checkpoints.iter().all(|c| c.term.abs() <= 1e-12));
    assert_eq!(s.verdict.kind, VerdictKind::Converges);

    let s = truncated_series(&TailModel::degenerate(1.0), 0.3, 10_000, &o).unwrap();
    assert!(s.checkpoints.iter().all(|c| c.term == 0.0));
    assert_eq!(s.verdict.kind, VerdictKind::Converges);

    let s = truncated_series(&TailModel::log_loglog(0.5), 0.5, 100_000, &o).unwrap();
    assert_eq!(s.verdict.kind, VerdictKind::Diverges);
    assert!(s.checkpoints.windows(2).all(|w| w[1].partial >= w[0].partial));
    assert!(truncated_series(&TailModel::degenerate(1.0), 0.3, 10, &o).is_err());
}

#[test]
fn membership_split_for_log_squared_family() {
    for p in [0.4, 0.7] {
        let r = classify_slln(&TailModel::log_squared(p, p), p, p, &opts()).unwrap();
        assert_eq!(r.clause, Clause::QEqualsPBelowOne);
        assert_eq!(r.membership, Membership::Member);
        assert_eq!(r.contradictions().count(), 0);
        for q in [0.5 * p, 0.8 * p] {
            let r = classify_slln(&TailModel::log_squared(p, q), p, q, &opts()).unwrap();
            assert_eq!(r.membership, Membership::NonMember, "p={p} q={q}");
            assert_eq!(r.contradictions().count(), 0);
        }
    }
}

#[test]
fn log_loglog_is_not_a_member() {
    let r = classify_slln(&TailModel::log_loglog(0.5), 0.5, 0.5, &opts()).unwrap();
    assert_eq!(r.membership, Membership::NonMember);
    assert_eq!(r.p_moment_verdict.as_ref().unwrap().kind, VerdictKind::Converges);
    assert_eq!(r.contradictions().count(), 0, "{:#?}", r.fact_checks);
}

#[test]
fn rademacher_and_sign_laws() {
    let r = classify_slln(&TailModel::rademacher(), 1.5, 0.5, &opts()).unwrap();
    assert_eq!(r.clause, Clause::QBelowOneAtMostP);
    assert_eq!(r.membership, Membership::Member);
    let m = TailModel::rademacher().with_sign_law(SignLaw::Nonnegative);
    let r = classify_slln(&m, 1.5, 0.5, &opts()).unwrap();
    assert_eq!(r.membership, Membership::NonMember);
    let m = TailModel::rademacher().with_sign_law(SignLaw::Split { positive: 0.7 });
    let r = classify_slln(&m, 1.5, 0.5, &opts()).unwrap();
    assert_eq!(r.membership, Membership::Inconclusive);
}

#[test]
fn out_of_scope_pairs() {
    let r = classify_slln(&TailModel::pareto(3.0), 1.5, 1.2, &opts()).unwrap();
    assert_eq!(r.clause, Clause::OutOfScope);
    assert_eq!(r.membership, Membership::Inconclusive);
    let r = classify_slln(&TailModel::pareto(3.0), 2.5, 0.5, &opts()).unwrap();
    assert!(r.integral_verdict.is_none());
}

#[test]
fn series_expectation_table() {
    let p = 0.6;
    let r = series_expectation_criterion(&TailModel::log_squared(p, p), p, p, &opts()).unwrap();
    assert_eq!(r.membership, Membership::NonMember);
    assert_eq!(r.contrast_membership, Some(Membership::Member));
    assert_eq!(r.contradictions().count(), 0);

    let r = series_expectation_criterion(&TailModel::pareto(2.0), 1.0, 0.5, &opts()).unwrap();
    assert_eq!(r.membership, Membership::Member);
    let r = series_expectation_criterion(&TailModel::zero(), 0.5, 0.5, &opts()).unwrap();
    assert_eq!(r.membership, Membership::Member);
}

#[test]
fn report_serializes() {
    let r = classify_slln(&TailModel::pareto(2.0), 1.0, 0.5, &opts()).unwrap();
    let json = r.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["membership"], "member");
    assert!(v["integral_verdict"]["evidence"]["beta"].is_number());
}

#[test]
fn membership_is_monotone_in_q() {
    // Member at q implies not NonMember at larger q in the same clause family.
    let models = [
        TailModel::pareto(0.8),
        TailModel::pareto(0.5),
        TailModel::critical_power(0.6),
    ];
    let p = 0.7;
    let qs = [0.2, 0.35, 0.5, 0.65];
    for m in &models {
        let mut seen_member = false;
        for &q in &qs {
            let r = classify_slln(m, p, q, &opts()).unwrap();
            if seen_member {
                assert_ne!(r.membership, Membership::NonMember, "{} q={q}", m.name);
            }
            seen_member |= r.membership == Membership::Member;
        }
    }
}
