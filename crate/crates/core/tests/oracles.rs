use num_rational::BigRational;
use num_traits::One;
use pq_slln::oracles::{
    exact_series_small, five_atom_law, lemma_max_check, lemma_max_lattice, random_law, ratio,
    small_series_check, symmetrization_check, symmetrization_lattice, DiscreteLaw, MAX_EXACT_N,
};
use pq_slln::tail_models::TailModel;
use pq_slln::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn lemma_max_lattice_small() {
    let rep = lemma_max_lattice(64).unwrap();
    assert_eq!(rep.checked, 64 * 30);
    assert!(rep.holds(), "{:?}", rep.violations.first());
    assert!(rep.min_margin >= 0.0);
}

#[test]
fn two_atom_maximum_has_closed_form() {
    // Y = 7 w.p. 1/(2n): E max = 7 (1 - (1 - 1/(2n))^n), n E Y / 2 = 7/4
    for n in [1u32, 2, 5, 40] {
        let law = DiscreteLaw::scaled_bernoulli(7.0, ratio(1, 2 * n as i64)).unwrap();
        let c = lemma_max_check(&law, n, 1.0).unwrap();
        let e_max = 7.0 * (1.0 - (1.0 - 0.5 / n as f64).powi(n as i32));
        assert!((c.rhs - e_max).abs() < 1e-12, "n={n}");
        assert!((c.lhs - 1.75).abs() < 1e-12);
        assert!(c.holds);
    }
}

#[test]
fn lemma_preconditions() {
    let law = DiscreteLaw::scaled_bernoulli(1.0, ratio(1, 2)).unwrap();
    assert!(matches!(
        lemma_max_check(&law, 4, 1.0),
        Err(Error::PreconditionViolated(_))
    ));
    assert!(matches!(
        lemma_max_check(&DiscreteLaw::rademacher(), 1, 1.0),
        Err(Error::PreconditionViolated(_))
    ));
    assert!(lemma_max_check(&law, 0, 1.0).is_err());
}

#[test]
fn symmetrization_lattice_has_no_violations() {
    let rep = symmetrization_lattice(100, 20240607).unwrap();
    assert_eq!(rep.checked, 100 * 4 * 5);
    assert!(rep.holds(), "{:?}", rep.violations.first());
}

#[test]
fn five_atom_law_symmetrization() {
    let law = five_atom_law();
    for p in [0.3, 0.7, 1.0, 1.5] {
        for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
            assert!(symmetrization_check(&law, p, t).unwrap().holds, "p={p} t={t}");
        }
    }
}

#[test]
fn exact_rademacher_series() {
    let rows = exact_series_small(&DiscreteLaw::rademacher(), 1.5, 0.5, 12).unwrap();
    assert_eq!(rows.len(), 12);
    assert!((rows[0].moment - 1.0).abs() < 1e-15);
    // S_2 is 0 w.p. 1/2 and |S_2| = 2 otherwise
    let want = 0.5 * (2.0f64 / 2f64.powf(1.0 / 1.5)).sqrt();
    assert!((rows[1].moment - want).abs() < 1e-15);
    for r in &rows {
        assert!(r.mass_is_one);
        assert_eq!(r.support, r.n as usize + 1);
    }
    assert!(exact_series_small(&DiscreteLaw::rademacher(), 1.5, 0.5, MAX_EXACT_N + 1).is_err());
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    let chk = small_series_check(
        &TailModel::rademacher(),
        &DiscreteLaw::rademacher(),
        1.0,
        0.5,
        12,
        20_000,
        9,
        None,
    )
    .unwrap();
    assert!(chk.holds(), "{:?}", chk.rows);
}

fn laws() -> impl Strategy<Value = DiscreteLaw> {
    any::<u64>().prop_map(|s| random_law(&mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetrized_law_is_a_symmetric_probability(law in laws()) {
        let s = law.symmetrized();
        prop_assert_eq!(s.total_mass(), BigRational::one());
        for (v, q) in s.atoms() {
            let mirror = s.atoms().iter().find(|(w, _)| *w == -*v).map(|(_, r)| r.clone());
            prop_assert_eq!(Some(q.clone()), mirror);
        }
    }

    #[test]
    fn convolution_keeps_unit_mass(law in laws(), n in 1u32..5) {
        let rows = exact_series_small(&law, 1.0, 1.0, n).unwrap();
        prop_assert!(rows.iter().all(|r| r.mass_is_one));
        // E|S_n| / n <= E|X| by the triangle inequality
        let first = rows[0].moment;
        prop_assert!(rows.iter().all(|r| r.moment <= first * (1.0 + 1e-12)));
    }

    #[test]
    fn random_symmetrization_instances_hold(law in laws(), p in 0.1f64..2.0, t in 0.0f64..8.0) {
        prop_assert!(symmetrization_check(&law, p, t).unwrap().holds);
    }
}
