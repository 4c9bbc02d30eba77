//! Built-in tail models and the analytic facts known about them.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use super::catalog::{Formula, Piece};
use super::{SignLaw, TailModel};

/// Closed-form inversion of `t -> P(|X| > t) < 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum ClosedFormQuantile {
    /// `|X| = c` almost surely.
    Constant { c: f64 },
    /// Tail `c * t^-a` at and beyond the quantile: `u_n = (c n)^(1/a)`.
    PowerInverse { c: f64, a: f64 },
}

impl ClosedFormQuantile {
    pub fn eval(&self, n: u64) -> f64 {
        match *self {
            ClosedFormQuantile::Constant { c } => c,
            ClosedFormQuantile::PowerInverse { c, a } => (c * n as f64).powf(1.0 / a),
        }
    }
}

/// Analytic conditions whose truth value may be known for a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Condition {
    /// `int_0^inf P^{q/p}(|X|^q > t) dt < inf`
    IntegralPq { p: f64, q: f64 },
    /// `E|X|^p < inf`
    PMoment { p: f64 },
    /// `E(|X|^p ln^delta(1 + |X|)) < inf`
    LlogL { p: f64, delta: f64 },
    /// `sum_n E(|X|^p 1(min{u_n^p, n} < |X|^p <= n)) / n < inf`
    TruncatedSeries { p: f64 },
    /// Almost sure convergence of `sum_n (1/n) (|S_n| / n^{1/p})^q`.
    Slln { p: f64, q: f64 },
    /// Convergence of `sum_n (1/n) E(|S_n| / n^{1/p})^q`.
    SeriesExpectation { p: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BuiltinKind {
    Degenerate {
        c: f64,
    },
    Pareto {
        alpha: f64,
    },
    /// `P(X > t) = e^q / (t^q (ln t)^{2p/q})` for `t > e`.
    LogSquared {
        p: f64,
        q: f64,
    },
    /// `P(X > t) = e^{ep+1} / (t^p ln t (ln ln t)^2)` for `t > e^e`.
    LogLoglog {
        p: f64,
    },
    /// `P(X > t) = t^-p` for `t > 1`.
    CriticalPower {
        p: f64,
    },
}

/// Known truth values for a built-in model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFacts {
    pub kind: BuiltinKind,
    pub provenance: String,
    pub quantile: Option<ClosedFormQuantile>,
}

/// A stored fact together with where it comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownFact {
    pub holds: bool,
    pub provenance: &'static str,
}

const EPS: f64 = 1e-12;

fn same(x: f64, y: f64) -> bool {
    (x - y).abs() <= EPS * x.abs().max(y.abs()).max(1.0)
}

fn fact(holds: bool, provenance: &'static str) -> Option<KnownFact> {
    Some(KnownFact { holds, provenance })
}

impl AnalyticFacts {
    /// Truth value of `cond` when it is known, `None` otherwise.
    pub fn fact(&self, cond: &Condition, sign: SignLaw) -> Option<KnownFact> {
        use Condition::*;
        match (self.kind, *cond) {
            (BuiltinKind::Degenerate { c }, _) => match *cond {
                Slln { p, q } | SeriesExpectation { p, q } => {
                    let mean_zero = c == 0.0 || sign == SignLaw::Symmetric;
                    slln_clause(p, q).map(|clause| KnownFact {
                        holds: !clause.needs_mean_zero() || mean_zero,
                        provenance: "bounded support: every moment condition holds",
                    })
                }
                _ => fact(true, "bounded support: every moment condition holds"),
            },
            (BuiltinKind::Pareto { alpha }, _) => {
                let finite = |p: f64| alpha > p;
                match *cond {
                    IntegralPq { p, .. } | PMoment { p } | LlogL { p, .. } => {
                        fact(finite(p), "closed form: integrand decays like t^(-alpha/p)")
                    }
                    TruncatedSeries { .. } => fact(
                        true,
                        "closed form: window is empty (alpha <= p) or E|X|^p ln|X| < inf (alpha > p)",
                    ),
                    Slln { p, q } | SeriesExpectation { p, q } => slln_clause(p, q).map(|clause| KnownFact {
                        holds: finite(p) && (!clause.needs_mean_zero() || sign == SignLaw::Symmetric),
                        provenance: "closed form: clause conditions reduce to alpha > p",
                    }),
                }
            }
            (BuiltinKind::LogSquared { p: pm, q: qm }, _) => match *cond {
                IntegralPq { p, q } if same(p, pm) && same(q, qm) => {
                    if qm < pm {
                        fact(false, "literature: the integral diverges for q < p")
                    } else {
                        fact(true, "closed form: with q = p the integral is E|X|^p")
                    }
                }
                PMoment { p } if same(p, pm) => fact(
                    qm >= pm,
                    "closed form: E|X|^p integrand ~ t^(-q/p) (ln t)^(-2p/q)",
                ),
                LlogL { p, delta } if same(p, pm) && same(qm, pm) && same(delta, 0.5) => {
                    fact(true, "literature: E(|X|^p ln^(1/2)(1+|X|^p)) < inf")
                }
                LlogL { p, delta } if same(p, pm) && same(qm, pm) && same(delta, 1.0) => {
                    fact(false, "closed form: integrand ~ 1/(t ln t) with delta = 1")
                }
                TruncatedSeries { p } if same(p, pm) && same(qm, pm) => fact(
                    true,
                    "literature: the delta = 1/2 llogl moment implies convergence",
                ),
                Slln { p, q } if same(p, pm) && same(q, qm) => {
                    fact(same(qm, pm), "literature: member for q = p, non-member for q < p")
                }
                SeriesExpectation { p, q } if same(p, pm) && same(q, qm) && same(qm, pm) => {
                    fact(false, "closed form: E(|X|^p ln(1+|X|)) is infinite")
                }
                SeriesExpectation { p, q } if same(p, pm) && same(q, qm) => {
                    fact(false, "literature: the integral diverges for q < p")
                }
                _ => None,
            },
            (BuiltinKind::LogLoglog { p: pm }, _) => match *cond {
                PMoment { p } if same(p, pm) => fact(true, "literature: E|X|^p < inf"),
                TruncatedSeries { p } if same(p, pm) => {
                    fact(false, "literature: the truncated series diverges")
                }
                LlogL { p, delta } if same(p, pm) && same(delta, 1.0) => {
                    fact(false, "closed form: integrand ~ 1/(t (ln ln t)^2) with delta = 1")
                }
                Slln { p, q } if same(p, pm) && same(q, pm) => {
                    fact(false, "literature: the truncated series diverges")
                }
                SeriesExpectation { p, q } if same(p, pm) && same(q, pm) => {
                    fact(false, "closed form: E(|X|^p ln(1+|X|)) is infinite")
                }
                _ => None,
            },
            (BuiltinKind::CriticalPower { p: pm }, _) => match *cond {
                PMoment { p } if same(p, pm) => fact(false, "closed form: E|X|^p = inf"),
                TruncatedSeries { p } if same(p, pm) => {
                    fact(true, "closed form: every term is 0 since u_n^p = n")
                }
                IntegralPq { p, q } if same(p, pm) => fact(
                    false,
                    if q < p {
                        "closed form: P^{q/p}(|X|^q > t) = 1/t beyond the knee"
                    } else {
                        "closed form: E|X|^p = inf"
                    },
                ),
                Slln { p, q } | SeriesExpectation { p, q } if same(p, pm) && q <= p => {
                    fact(false, "closed form: E|X|^p = inf")
                }
                _ => None,
            },
        }
    }
}

/// In-scope clauses of the characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// `0 < q < p < 1`
    QBelowPBelowOne,
    /// `0 < q = p < 1`
    QEqualsPBelowOne,
    /// `0 < q < 1 <= p < 2`
    QBelowOneAtMostP,
    OutOfScope,
}

impl Clause {
    pub fn needs_mean_zero(self) -> bool {
        self == Clause::QBelowOneAtMostP
    }
}

pub fn clause_of(p: f64, q: f64) -> Clause {
    if !(p > 0.0 && p < 2.0 && q > 0.0) {
        Clause::OutOfScope
    } else if p < 1.0 && q < p && !same(p, q) {
        Clause::QBelowPBelowOne
    } else if p < 1.0 && same(p, q) {
        Clause::QEqualsPBelowOne
    } else if q < 1.0 && p >= 1.0 {
        Clause::QBelowOneAtMostP
    } else {
        Clause::OutOfScope
    }
}

fn slln_clause(p: f64, q: f64) -> Option<Clause> {
    match clause_of(p, q) {
        Clause::OutOfScope => None,
        c => Some(c),
    }
}

impl TailModel {
    /// `|X| = c` almost surely, symmetric sign.
    pub fn degenerate(c: f64) -> Self {
        assert!(
            c >= 0.0 && c.is_finite(),
            "degenerate level must be finite and >= 0"
        );
        let pieces = if c == 0.0 {
            vec![Piece::new(0.0, f64::INFINITY, Formula::constant(0.0))]
        } else {
            vec![
                Piece::new(0.0, c, Formula::constant(1.0)),
                Piece::new(c, f64::INFINITY, Formula::constant(0.0)),
            ]
        };
        let name = if c == 0.0 {
            "zero".to_string()
        } else {
            format!("degenerate-{c}")
        };
        TailModel::new(name, pieces, SignLaw::Symmetric).with_facts(AnalyticFacts {
            kind: BuiltinKind::Degenerate { c },
            provenance: "degenerate law".into(),
            quantile: Some(ClosedFormQuantile::Constant { c }),
        })
    }

    pub fn zero() -> Self {
        Self::degenerate(0.0)
    }

    /// Symmetric signs of unit magnitude.
    pub fn rademacher() -> Self {
        let mut m = Self::degenerate(1.0);
        m.name = "rademacher".into();
        m
    }

    /// `P(|X| > t) = t^-alpha` for `t >= 1`.
    pub fn pareto(alpha: f64) -> Self {
        assert!(alpha > 0.0, "pareto index must be positive");
        TailModel::new(
            format!("pareto-{alpha}"),
            vec![
                Piece::new(0.0, 1.0, Formula::constant(1.0)),
                Piece::new(1.0, f64::INFINITY, Formula::power(1.0, alpha)),
            ],
            SignLaw::Symmetric,
        )
        .with_facts(AnalyticFacts {
            kind: BuiltinKind::Pareto { alpha },
            provenance: "Pareto tail t^-alpha beyond 1".into(),
            quantile: Some(ClosedFormQuantile::PowerInverse { c: 1.0, a: alpha }),
        })
    }

    /// Tail `1{t <= e} + e^q / (t^q (ln t)^{2p/q}) 1{t > e}`.
    pub fn log_squared(p: f64, q: f64) -> Self {
        assert!(
            p > 0.0 && p < 1.0 && q > 0.0,
            "log-squared family needs 0 < p < 1, q > 0"
        );
        TailModel::new(
            format!("log-squared(p={p},q={q})"),
            vec![
                Piece::new(0.0, E, Formula::constant(1.0)),
                Piece::new(E, f64::INFINITY, Formula::power_log(q.exp(), q, 2.0 * p / q)),
            ],
            SignLaw::Symmetric,
        )
        .with_facts(AnalyticFacts {
            kind: BuiltinKind::LogSquared { p, q },
            provenance: "log-squared tail family".into(),
            quantile: None,
        })
    }

    /// Tail `1{t <= e^e} + e^{ep+1} / (t^p ln t (ln ln t)^2) 1{t > e^e}`.
    pub fn log_loglog(p: f64) -> Self {
        assert!(p > 0.0 && p < 1.0, "log-loglog family needs 0 < p < 1");
        let knee = E.powf(E);
        TailModel::new(
            format!("log-loglog(p={p})"),
            vec![
                Piece::new(0.0, knee, Formula::constant(1.0)),
                Piece::new(
                    knee,
                    f64::INFINITY,
                    Formula::power_log_loglog((E * p + 1.0).exp(), p, 1.0, 2.0),
                ),
            ],
            SignLaw::Symmetric,
        )
        .with_facts(AnalyticFacts {
            kind: BuiltinKind::LogLoglog { p },
            provenance: "log-loglog tail family".into(),
            quantile: None,
        })
    }

    /// Tail `1{t <= 1} + t^-p 1{t > 1}`.
    pub fn critical_power(p: f64) -> Self {
        assert!(p > 0.0 && p < 1.0, "critical power family needs 0 < p < 1");
        TailModel::new(
            format!("critical-power(p={p})"),
            vec![
                Piece::new(0.0, 1.0, Formula::constant(1.0)),
                Piece::new(1.0, f64::INFINITY, Formula::power(1.0, p)),
            ],
            SignLaw::Symmetric,
        )
        .with_facts(AnalyticFacts {
            kind: BuiltinKind::CriticalPower { p },
            provenance: "critical power tail".into(),
            quantile: Some(ClosedFormQuantile::PowerInverse { c: 1.0, a: p }),
        })
    }
}

/// Reference to a built-in model by family name and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "kebab-case")]
pub enum BuiltinSpec {
    Zero,
    Rademacher,
    Degenerate { c: f64 },
    Pareto { alpha: f64 },
    LogSquared { p: f64, q: f64 },
    LogLoglog { p: f64 },
    CriticalPower { p: f64 },
}

impl BuiltinSpec {
    pub fn build(&self) -> crate::error::Result<TailModel> {
        use crate::error::Error;
        let check_p = |p: f64| {
            if p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!(
                    "this family needs 0 < p < 1, got {p}"
                )))
            }
        };
        Ok(match *self {
            BuiltinSpec::Zero => TailModel::zero(),
            BuiltinSpec::Rademacher => TailModel::rademacher(),
            BuiltinSpec::Degenerate { c } => {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::InvalidModel(format!("degenerate level {c}")));
                }
                TailModel::degenerate(c)
            }
            BuiltinSpec::Pareto { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidModel(format!("pareto index {alpha}")));
                }
                TailModel::pareto(alpha)
            }
            BuiltinSpec::LogSquared { p, q } => {
                check_p(p)?;
                if !(q > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "log-squared family needs q > 0, got {q}"
                    )));
                }
                TailModel::log_squared(p, q)
            }
            BuiltinSpec::LogLoglog { p } => {
                check_p(p)?;
                TailModel::log_loglog(p)
            }
            BuiltinSpec::CriticalPower { p } => {
                check_p(p)?;
                TailModel::critical_power(p)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_table() {
        assert_eq!(clause_of(0.5, 0.3), Clause::QBelowPBelowOne);
        assert_eq!(clause_of(0.5, 0.5), Clause::QEqualsPBelowOne);
        assert_eq!(clause_of(1.5, 0.5), Clause::QBelowOneAtMostP);
        assert_eq!(clause_of(1.0, 0.5), Clause::QBelowOneAtMostP);
        assert_eq!(clause_of(0.5, 0.7), Clause::OutOfScope);
        assert_eq!(clause_of(1.5, 1.0), Clause::OutOfScope);
        assert_eq!(clause_of(2.0, 0.5), Clause::OutOfScope);
    }

    #[test]
    fn builtin_spec_json() {
        let s: BuiltinSpec = serde_json::from_str(r#"{"builtin":"critical-power","p":0.5}"#).unwrap();
        assert_eq!(s, BuiltinSpec::CriticalPower { p: 0.5 });
        let s: BuiltinSpec = serde_json::from_str(r#"{"builtin":"rademacher"}"#).unwrap();
        assert_eq!(s.build().unwrap().name, "rademacher");
        let bad: BuiltinSpec = serde_json::from_str(r#"{"builtin":"log-loglog","p":1.5}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn log_loglog_facts() {
        let m = TailModel::log_loglog(0.5);
        let f = m.analytic.as_ref().unwrap();
        let s = SignLaw::Symmetric;
        assert!(f.fact(&Condition::PMoment { p: 0.5 }, s).unwrap().holds);
        assert!(!f.fact(&Condition::TruncatedSeries { p: 0.5 }, s).unwrap().holds);
        assert!(f.fact(&Condition::PMoment { p: 0.7 }, s).is_none());
    }
}
