use serde::{Deserialize, Serialize};

use super::CriteriaOptions;
use crate::numeric::linear_fit;

/// Exponent used in place of `beta` when the integrand vanishes at the window edge.
pub const VANISHING_BETA: f64 = 1e3;

const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Converges,
    Diverges,
    Inconclusive,
}

/// Local exponents of the integrand (or series terms) at the window edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEvidence {
    /// Fitted `beta` in `g(t) ~ t^-beta` on the last decade.
    pub beta: f64,
    /// Fitted `lambda` in `t g(t) ~ (ln t)^-lambda`, present iff `|beta - 1| < beta_band`.
    pub lambda: Option<f64>,
    pub window: (f64, f64),
    /// Outcome of the edge-fit decision rule alone.
    pub numeric_kind: VerdictKind,
}

/// Exponents `(e0, e1, e2)` of the leading-order form `t^-e0 (ln t)^-e1 (ln ln t)^-e2`,
/// derived from the exact tail formula beyond its last breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Asymptotics {
    /// The integrand is identically zero beyond `from`.
    Vanishing {
        from: f64,
    },
    /// Terms vanish beyond some index because the truncation window is empty.
    EmptyWindow,
    Regular {
        exponents: [f64; 3],
    },
}

impl Asymptotics {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Asymptotics::Vanishing { .. } | Asymptotics::EmptyWindow => VerdictKind::Converges,
            Asymptotics::Regular { exponents } => kind_of_exponents(*exponents),
        }
    }
}

fn cmp_one(x: f64) -> std::cmp::Ordering {
    if (x - 1.0).abs() <= EXPONENT_TOL {
        std::cmp::Ordering::Equal
    } else if x > 1.0 {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Less
    }
}

/// Convergence of `int^inf t^-e0 (ln t)^-e1 (ln ln t)^-e2 dt` (and of the matching series).
pub fn kind_of_exponents(e: [f64; 3]) -> VerdictKind {
    use std::cmp::Ordering::*;
    for x in e {
        match cmp_one(x) {
            Greater => return VerdictKind::Converges,
            Less => return VerdictKind::Diverges,
            Equal => continue,
        }
    }
    VerdictKind::Diverges
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Value of the truncated integral or partial sum over the evaluated window.
    pub estimate_on_window: f64,
    pub evidence: ExponentEvidence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<Asymptotics>,
    /// Extrapolated bound on the remainder beyond the window; set iff `kind` is `Converges`.
    pub remainder_bound: Option<f64>,
    /// `(t, partial value)` on the last decade of the window.
    pub partial_values: Vec<(f64, f64)>,
    /// Fitted slope of the partial values against `ln t` on the last decade.
    pub partial_slope: f64,
}

/// Geometric grid of `per_decade + 1` points on `[hi / 10, hi]`.
pub fn last_decade(hi: f64, per_decade: usize) -> Vec<f64> {
    let lo = hi / 10.0;
    (0..=per_decade)
        .map(|i| {
            if i == per_decade {
                hi
            } else {
                lo * 10f64.powf(i as f64 / per_decade as f64)
            }
        })
        .collect()
}

/// Fits the edge exponents of `values[i] = g(xs[i])` and applies the decision rule.
pub fn edge_evidence(xs: &[f64], values: &[f64], opts: &CriteriaOptions) -> ExponentEvidence {
    let window = (xs[0], *xs.last().unwrap());
    let (lx, lg): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(values)
        .filter(|(_, &g)| g > 0.0 && g.is_finite())
        .map(|(&x, &g)| (x.ln(), g.ln()))
        .unzip();
    let beta = if lx.len() < 3 {
        VANISHING_BETA
    } else {
        match linear_fit(&lx, &lg) {
            Some(f) => (-f.slope).min(VANISHING_BETA),
            None => VANISHING_BETA,
        }
    };
    let delta = opts.delta;
    let mut lambda = None;
    let numeric_kind = if beta > 1.0 + delta {
        VerdictKind::Converges
    } else if beta < 1.0 - delta {
        VerdictKind::Diverges
    } else {
        let llx: Vec<f64> = lx.iter().map(|l| l.ln()).collect();
        let ltg: Vec<f64> = lx.iter().zip(&lg).map(|(l, g)| l + g).collect();
        let fit = linear_fit(&llx, &ltg).map(|f| -f.slope);
        lambda = Some(fit.unwrap_or(f64::NAN));
        match fit {
            Some(l) if l > 1.0 + delta => VerdictKind::Converges,
            Some(l) if l < 1.0 - delta => VerdictKind::Diverges,
            _ => VerdictKind::Inconclusive,
        }
    };
    ExponentEvidence {
        beta,
        lambda,
        window,
        numeric_kind,
    }
}

/// Remainder bound `int_T^inf g` extrapolated from the edge value `g(T)`.
pub fn remainder_bound(t: f64, g_t: f64, evidence: &ExponentEvidence, asym: Option<&Asymptotics>) -> f64 {
    if g_t <= 0.0 {
        return 0.0;
    }
    let numeric = || {
        if evidence.beta > 1.0 {
            g_t * t / (evidence.beta - 1.0)
        } else {
            match evidence.lambda {
                Some(l) if l > 1.0 => g_t * t * t.ln() / (l - 1.0),
                _ => f64::INFINITY,
            }
        }
    };
    match asym {
        Some(Asymptotics::Vanishing { .. }) => 0.0,
        Some(Asymptotics::Regular {
            exponents: [e0, e1, e2],
        }) => {
            let lt = t.ln();
            if cmp_one(*e0).is_gt() {
                g_t * t / (e0 - 1.0)
            } else if cmp_one(*e1).is_gt() {
                g_t * t * lt / (e1 - 1.0)
            } else if cmp_one(*e2).is_gt() {
                g_t * t * lt * lt.ln() / (e2 - 1.0)
            } else {
                f64::INFINITY
            }
        }
        // Terms are still nonzero at the edge; fall back to the fitted exponents.
        Some(Asymptotics::EmptyWindow) | None => numeric(),
    }
}

/// Combines the edge fit, the leading-order exponents and the partial values.
pub fn decide(
    evidence: ExponentEvidence,
    asymptotics: Option<Asymptotics>,
    estimate_on_window: f64,
    partial_values: Vec<(f64, f64)>,
    edge_value: f64,
) -> Verdict {
    let mut kind = match &asymptotics {
        Some(a) => a.kind(),
        None => evidence.numeric_kind,
    };
    let (lx, ly): (Vec<f64>, Vec<f64>) = partial_values.iter().map(|&(t, v)| (t.ln(), v)).unzip();
    let partial_slope = linear_fit(&lx, &ly).map(|f| f.slope).unwrap_or(0.0);
    if kind == VerdictKind::Diverges {
        let increasing = partial_values.windows(2).all(|w| w[1].1 > w[0].1);
        if !(increasing && partial_slope > 0.0) {
            kind = VerdictKind::Inconclusive;
        }
    }
    let t_edge = evidence.window.1;
    let remainder = if kind == VerdictKind::Converges {
        let r = remainder_bound(t_edge, edge_value, &evidence, asymptotics.as_ref());
        if r.is_finite() {
            Some(r)
        } else {
            kind = VerdictKind::Inconclusive;
            None
        }
    } else {
        None
    };
    Verdict {
        kind,
        estimate_on_window,
        evidence,
        asymptotics,
        remainder_bound: remainder,
        partial_values,
        partial_slope,
    }
}
