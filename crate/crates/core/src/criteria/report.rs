use serde::{Deserialize, Serialize};

use super::moments::{integral_pq, llogl_moment, p_moment};
use super::series::truncated_series;
use super::verdict::{Verdict, VerdictKind};
use super::CriteriaOptions;
use crate::error::Result;
use crate::tail_models::{clause_of, Clause, Condition, SignLaw, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

/// Which equivalent condition is used for the `q = p < 1` clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClauseTable {
    /// `E|X|^p < inf` and the truncated series.
    AlmostSure,
    /// `E(|X|^p ln(1 + |X|)) < inf`.
    SeriesExpectation,
}

/// Comparison of a computed verdict with a stored analytic fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactCheck {
    pub condition: Condition,
    pub stored: bool,
    pub computed: VerdictKind,
    pub provenance: String,
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub model: String,
    pub p: f64,
    pub q: f64,
    pub clause: Clause,
    pub table: ClauseTable,
    /// `None` only when `(p, q)` is outside the range where the integral is defined.
    pub integral_verdict: Option<Verdict>,
    pub p_moment_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub llogl_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated_series_verdict: Option<Verdict>,
    pub mean_zero_required: bool,
    /// `None` when the sign law does not determine the mean.
    pub mean_zero: Option<bool>,
    pub membership: Membership,
    /// Membership under the other clause table, for contrast.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contrast_membership: Option<Membership>,
    pub fact_checks: Vec<FactCheck>,
    /// Closed forms used while evaluating the report.
    pub closed_forms: Vec<String>,
}

impl CriterionReport {
    pub fn contradictions(&self) -> impl Iterator<Item = &FactCheck> {
        self.fact_checks.iter().filter(|f| f.contradiction)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Mean-zero status read off the sign law.
pub fn mean_zero_status(model: &TailModel) -> Option<bool> {
    if model.is_zero() {
        return Some(true);
    }
    match model.sign_law {
        SignLaw::Symmetric => Some(true),
        SignLaw::Split { positive } if positive == 0.5 => Some(true),
        SignLaw::Split { .. } => None,
        SignLaw::Nonnegative => Some(false),
    }
}

fn to_membership(kind: VerdictKind) -> Membership {
    match kind {
        VerdictKind::Converges => Membership::Member,
        VerdictKind::Diverges => Membership::NonMember,
        VerdictKind::Inconclusive => Membership::Inconclusive,
    }
}

/// Any inconclusive input makes the result inconclusive; otherwise all must hold.
fn all_of(parts: &[Option<bool>]) -> Membership {
    if parts.iter().any(|p| p.is_none()) {
        Membership::Inconclusive
    } else if parts.iter().all(|p| *p == Some(true)) {
        Membership::Member
    } else {
        Membership::NonMember
    }
}

fn holds(v: &Verdict) -> Option<bool> {
    match v.kind {
        VerdictKind::Converges => Some(true),
        VerdictKind::Diverges => Some(false),
        VerdictKind::Inconclusive => None,
    }
}

fn membership_of(
    clause: Clause,
    table: ClauseTable,
    integral: Option<&Verdict>,
    p_moment: Option<&Verdict>,
    truncated: Option<&Verdict>,
    llogl: Option<&Verdict>,
    mean_zero: Option<bool>,
) -> Membership {
    let h = |v: Option<&Verdict>| v.and_then(holds);
    match clause {
        Clause::OutOfScope => Membership::Inconclusive,
        Clause::QBelowPBelowOne => integral.map_or(Membership::Inconclusive, |v| to_membership(v.kind)),
        Clause::QEqualsPBelowOne => match table {
            ClauseTable::AlmostSure => all_of(&[h(p_moment), h(truncated)]),
            ClauseTable::SeriesExpectation => all_of(&[h(llogl)]),
        },
        Clause::QBelowOneAtMostP => all_of(&[mean_zero, h(integral)]),
    }
}

fn check_fact(model: &TailModel, checks: &mut Vec<FactCheck>, condition: Condition, computed: VerdictKind) {
    let Some(facts) = &model.analytic else { return };
    let Some(known) = facts.fact(&condition, model.sign_law) else {
        return;
    };
    let contradiction = matches!(
        (computed, known.holds),
        (VerdictKind::Converges, false) | (VerdictKind::Diverges, true)
    );
    checks.push(FactCheck {
        condition,
        stored: known.holds,
        computed,
        provenance: known.provenance.to_string(),
        contradiction,
    });
}

fn membership_kind(m: Membership) -> VerdictKind {
    match m {
        Membership::Member => VerdictKind::Converges,
        Membership::NonMember => VerdictKind::Diverges,
        Membership::Inconclusive => VerdictKind::Inconclusive,
    }
}

fn evaluate(
    model: &TailModel,
    p: f64,
    q: f64,
    table: ClauseTable,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    let clause = clause_of(p, q);
    let computable = p > 0.0 && p < 2.0 && q > 0.0 && q.is_finite();
    let (integral, pm) = if computable {
        (
            Some(integral_pq(model, p, q, opts)?),
            Some(p_moment(model, p, opts)?),
        )
    } else {
        (None, None)
    };
    let q_eq_p = clause == Clause::QEqualsPBelowOne;
    let truncated = if q_eq_p {
        Some(truncated_series(model, p, opts.n_max, opts)?.verdict)
    } else {
        None
    };
    let llogl = if q_eq_p && table == ClauseTable::SeriesExpectation {
        Some(llogl_moment(model, p, 1.0, opts)?)
    } else {
        None
    };
    let mean_zero = mean_zero_status(model);
    let membership = membership_of(
        clause,
        table,
        integral.as_ref(),
        pm.as_ref(),
        truncated.as_ref(),
        llogl.as_ref(),
        mean_zero,
    );
    let other = match table {
        ClauseTable::AlmostSure => ClauseTable::SeriesExpectation,
        ClauseTable::SeriesExpectation => ClauseTable::AlmostSure,
    };
    let contrast_membership = (q_eq_p && table == ClauseTable::SeriesExpectation).then(|| {
        membership_of(
            clause,
            other,
            integral.as_ref(),
            pm.as_ref(),
            truncated.as_ref(),
            llogl.as_ref(),
            mean_zero,
        )
    });

    let mut fact_checks = Vec::new();
    if let Some(v) = &integral {
        check_fact(model, &mut fact_checks, Condition::IntegralPq { p, q }, v.kind);
    }
    if let Some(v) = &pm {
        check_fact(model, &mut fact_checks, Condition::PMoment { p }, v.kind);
    }
    if let Some(v) = &truncated {
        check_fact(model, &mut fact_checks, Condition::TruncatedSeries { p }, v.kind);
    }
    if let Some(v) = &llogl {
        check_fact(
            model,
            &mut fact_checks,
            Condition::LlogL { p, delta: 1.0 },
            v.kind,
        );
    }
    let cond = match table {
        ClauseTable::AlmostSure => Condition::Slln { p, q },
        ClauseTable::SeriesExpectation => Condition::SeriesExpectation { p, q },
    };
    check_fact(model, &mut fact_checks, cond, membership_kind(membership));

    let closed_forms = model
        .analytic
        .iter()
        .filter(|f| f.quantile.is_some() && q_eq_p)
        .map(|f| format!("closed-form quantile for {}", f.provenance))
        .collect();

    Ok(CriterionReport {
        model: model.name.clone(),
        p,
        q,
        clause,
        table,
        integral_verdict: integral,
        p_moment_verdict: pm,
        llogl_verdict: llogl,
        truncated_series_verdict: truncated,
        mean_zero_required: clause.needs_mean_zero(),
        mean_zero,
        membership,
        contrast_membership,
        fact_checks,
        closed_forms,
    })
}

/// Clause-by-clause membership of `model` in SLLN(p, q).
pub fn classify_slln(model: &TailModel, p: f64, q: f64, opts: &CriteriaOptions) -> Result<CriterionReport> {
    evaluate(model, p, q, ClauseTable::AlmostSure, opts)
}

/// Finiteness of `sum (1/n) E(|S_n| / n^{1/p})^q`: as [`classify_slln`] with the `q = p`
/// clause replaced by `E(|X|^p ln(1 + |X|)) < inf`. The almost-sure membership is kept
/// in `contrast_membership`.
pub fn series_expectation_criterion(
    model: &TailModel,
    p: f64,
    q: f64,
    opts: &CriteriaOptions,
) -> Result<CriterionReport> {
    evaluate(model, p, q, ClauseTable::SeriesExpectation, opts)
}
