//! Exact enumeration on small discrete laws: the maximal and symmetrization inequalities
//! and reference values of `E(|S_n| / n^{1/p})^q`.
//!
//! Probabilities are rationals, so inequality checks are decided without rounding.

pub mod crosscheck;
pub mod law;
pub mod lemmas;
pub mod series;

pub use crosscheck::{small_series_check, SmallSeriesCheck, SmallSeriesRow};
pub use law::{ratio, DiscreteLaw, LawSummary};
pub use lemmas::{
    five_atom_law, lemma_max_check, lemma_max_lattice, random_law, symmetrization_check,
    symmetrization_lattice, InequalityCheck, LatticeReport, SYMMETRIZATION_EXPONENTS,
    SYMMETRIZATION_THRESHOLDS,
};
pub use series::{exact_series_small, ExactTerm, MAX_EXACT_N, STATE_CAP};
