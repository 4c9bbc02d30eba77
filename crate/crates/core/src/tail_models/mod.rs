//! Exact tail models: survival functions, quantiles, inverse-transform sampling and
//! truncated moments.
//!
//! A model is a list of catalog pieces covering `[0, inf)`. `survival(t)` is
//! `P(|X| > t)`; the sign of `X` is attached separately through [`SignLaw`].

mod builtins;
mod catalog;
mod table;

pub use builtins::{
    clause_of, AnalyticFacts, BuiltinKind, BuiltinSpec, Clause, ClosedFormQuantile, Condition, KnownFact,
};
pub use catalog::{Formula, FormulaId, FormulaParams, Piece};
pub use table::CumulativeTailTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadOptions};

/// How the sign of `X` is drawn given `|X|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignLaw {
    #[default]
    Symmetric,
    Nonnegative,
    /// Positive with probability `positive`, negative otherwise.
    Split {
        positive: f64,
    },
}

impl SignLaw {
    #[inline]
    pub fn apply(&self, magnitude: f64, sign_uniform: f64) -> f64 {
        match *self {
            SignLaw::Symmetric => {
                if sign_uniform < 0.5 {
                    -magnitude
                } else {
                    magnitude
                }
            }
            SignLaw::Nonnegative => magnitude,
            SignLaw::Split { positive } => {
                if sign_uniform < 1.0 - positive {
                    -magnitude
                } else {
                    magnitude
                }
            }
        }
    }
}

/// Leading-order behaviour of the tail beyond the last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailSignature {
    /// `P(|X| > t) = 0` for `t >= upper`.
    Bounded { upper: f64 },
    /// `P(|X| > t) = c t^-a (ln t)^-b (ln ln t)^-d` for all large `t`.
    Regular { c: f64, a: f64, b: f64, d: f64 },
}

/// Result of solving `u_n = inf{t : P(|X| > t) < 1/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileResult {
    pub n: u64,
    pub u_n: f64,
    pub bracket_width: f64,
    pub closed_form: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub name: String,
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub sign_law: SignLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticFacts>,
}

/// JSON document for user-defined models.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub sign_law: SignLaw,
}

/// A model named in a configuration file: a built-in family or an inline custom document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Builtin {
        #[serde(flatten)]
        spec: BuiltinSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sign_law: Option<SignLaw>,
    },
    Custom(ModelDocument),
}

impl ModelRef {
    pub fn build(&self) -> Result<TailModel> {
        match self {
            ModelRef::Builtin { spec, sign_law } => {
                let m = spec.build()?;
                Ok(match sign_law {
                    Some(s) => m.with_sign_law(*s),
                    None => m,
                })
            }
            ModelRef::Custom(doc) => TailModel::from_document(doc.clone()),
        }
    }
}

impl TailModel {
    pub fn new(name: impl Into<String>, pieces: Vec<Piece>, sign_law: SignLaw) -> Self {
        Self {
            name: name.into(),
            pieces,
            sign_law,
            analytic: None,
        }
    }

    pub fn with_facts(mut self, facts: AnalyticFacts) -> Self {
        self.analytic = Some(facts);
        self
    }

    pub fn with_sign_law(mut self, sign_law: SignLaw) -> Self {
        self.sign_law = sign_law;
        self
    }

    /// Parses and validates a custom model document.
    pub fn from_document(doc: ModelDocument) -> Result<Self> {
        let m = TailModel::new(doc.name, doc.pieces, doc.sign_law);
        m.validate()?;
        Ok(m)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s).map_err(|e| Error::InvalidModel(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            name: self.name.clone(),
            pieces: self.pieces.clone(),
            sign_law: self.sign_law,
        }
    }

    #[inline]
    fn piece_index(&self, t: f64) -> usize {
        let i = self.pieces.partition_point(|p| p.t_lo <= t);
        i.saturating_sub(1)
    }

    /// `P(|X| > t)`, clamped to `[0, 1]`.
    #[inline]
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0;
        }
        let piece = &self.pieces[self.piece_index(t)];
        let v = piece.formula.eval(t);
        if v.is_nan() {
            0.0
        } else {
            v.clamp(0.0, 1.0)
        }
    }

    /// `P(|X|^p > y) = survival(y^(1/p))`.
    #[inline]
    pub fn power_survival(&self, p: f64, y: f64) -> f64 {
        if y <= 0.0 {
            return self.survival(0.0_f64.max(y));
        }
        self.survival(y.powf(1.0 / p))
    }

    /// Piece boundaries strictly above zero.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| p.t_lo)
            .filter(|&t| t > 0.0 && t.is_finite())
            .collect()
    }

    pub fn support_bounds(&self) -> (f64, f64) {
        let lower = self
            .pieces
            .iter()
            .take_while(|p| p.formula.is_constant() && p.formula.params.c >= 1.0)
            .last()
            .map(|p| p.t_hi)
            .unwrap_or(0.0);
        let upper = match self.signature() {
            Some(TailSignature::Bounded { upper }) => upper,
            _ => f64::INFINITY,
        };
        (lower.min(upper), upper)
    }

    /// `true` when `|X| = 0` almost surely.
    pub fn is_zero(&self) -> bool {
        self.survival(0.0) == 0.0
    }

    pub fn signature(&self) -> Option<TailSignature> {
        let last = self.pieces.last()?;
        if !last.t_hi.is_infinite() {
            return None;
        }
        if last.formula.is_constant() {
            if last.formula.params.c != 0.0 {
                return None;
            }
            // Walk back over trailing zero pieces.
            let upper = self
                .pieces
                .iter()
                .rev()
                .take_while(|p| p.formula.is_constant() && p.formula.params.c == 0.0)
                .last()
                .map(|p| p.t_lo)
                .unwrap_or(0.0);
            return Some(TailSignature::Bounded { upper });
        }
        let p = last.formula.params;
        Some(TailSignature::Regular {
            c: p.c,
            a: p.a,
            b: p.b,
            d: p.d,
        })
    }

    /// Checks coverage of `[0, inf)`, parameter ranges, monotonicity on a 1000-point
    /// geometric grid plus every breakpoint, and vanishing at infinity.
    pub fn validate(&self) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::InvalidModel("no pieces".into()));
        }
        if self.pieces[0].t_lo != 0.0 {
            return Err(Error::InvalidModel("first piece must start at 0".into()));
        }
        for w in self.pieces.windows(2) {
            if w[0].t_hi != w[1].t_lo || !(w[0].t_lo < w[0].t_hi) {
                return Err(Error::InvalidModel(format!(
                    "pieces must be contiguous and increasing near t={}",
                    w[0].t_hi
                )));
            }
        }
        let last = self.pieces.last().unwrap();
        if !last.t_hi.is_infinite() {
            return Err(Error::InvalidModel("last piece must extend to infinity".into()));
        }
        for piece in &self.pieces {
            piece.formula.check()?;
            if piece.t_lo < piece.formula.domain_start() {
                return Err(Error::InvalidModel(format!(
                    "formula {:?} is undefined at t={}",
                    piece.formula.id, piece.t_lo
                )));
            }
            let start = piece.value_at_start();
            if !start.is_finite() || start > 1.0 + 1e-12 {
                return Err(Error::InvalidModel(format!(
                    "survival {start} at t={} is not a probability",
                    piece.t_lo
                )));
            }
        }
        if let SignLaw::Split { positive } = self.sign_law {
            if !(0.0..=1.0).contains(&positive) {
                return Err(Error::InvalidModel(format!("sign split {positive}")));
            }
        }
        if last.value_at_end() != 0.0 {
            return Err(Error::InvalidModel("survival does not vanish at infinity".into()));
        }
        let mut grid: Vec<f64> = (0..1000)
            .map(|i| 10f64.powf(-6.0 + 36.0 * i as f64 / 999.0))
            .collect();
        for p in &self.pieces {
            grid.push(p.t_lo);
            if p.t_hi.is_finite() {
                // Left limit at the right end.
                grid.push(p.t_hi * (1.0 - 1e-12));
            }
        }
        grid.push(0.0);
        grid.sort_by(f64::total_cmp);
        check_monotone(&grid, |t| {
            let piece = &self.pieces[self.piece_index(t)];
            piece.formula.eval(t)
        })
    }

    /// `inf{t : survival(t) <= level}` (or `< level` when `strict`), by walking the
    /// pieces and inverting the first one that crosses the level.
    pub fn generalized_inverse(&self, level: f64, strict: bool) -> f64 {
        let crosses = |v: f64| if strict { v < level } else { v <= level };
        for piece in &self.pieces {
            let start = piece.value_at_start().min(1.0);
            if crosses(start) {
                return piece.t_lo;
            }
            if piece.formula.is_constant() {
                continue;
            }
            let end = piece.value_at_end();
            if end < level {
                return piece.formula.solve_decreasing(level, piece.t_lo, piece.t_hi);
            }
        }
        f64::INFINITY
    }

    /// Inverse-transform draw: `|X| = inf{t : survival(t) <= uniform}` with a sign from
    /// `sign_uniform` according to the sign law.
    #[inline]
    pub fn sample(&self, uniform: f64, sign_uniform: f64) -> f64 {
        let magnitude = self.generalized_inverse(uniform, false);
        if magnitude == 0.0 {
            return 0.0;
        }
        self.sign_law.apply(magnitude, sign_uniform)
    }

    /// Quantile `u_n`; closed form when the analytic facts carry one, bisection otherwise.
    pub fn quantile_un(&self, n: u64) -> Result<QuantileResult> {
        if n == 0 {
            return Err(Error::Domain("quantile order needs n >= 1".into()));
        }
        if let Some(form) = self.analytic.as_ref().and_then(|f| f.quantile) {
            let u_n = form.eval(n);
            let bracket_width = match form {
                ClosedFormQuantile::Constant { .. } => 0.0,
                ClosedFormQuantile::PowerInverse { .. } => 1e-12 * u_n,
            };
            return Ok(QuantileResult {
                n,
                u_n,
                bracket_width,
                closed_form: true,
            });
        }
        self.quantile_bisection(n)
    }

    /// Bisection on `[0, T]` with `T` doubled until `survival(T) < 1/n`; relative
    /// tolerance `1e-12`.
    pub fn quantile_bisection(&self, n: u64) -> Result<QuantileResult> {
        if n == 0 {
            return Err(Error::Domain("quantile order needs n >= 1".into()));
        }
        let level = 1.0 / n as f64;
        let s0 = self.survival(0.0);
        if s0 < level {
            return Ok(QuantileResult {
                n,
                u_n: 0.0,
                bracket_width: 0.0,
                closed_form: false,
            });
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut prev = (0.0, s0);
        loop {
            let s = self.survival(hi);
            if s > prev.1 {
                return Err(Error::NonMonotoneTail {
                    lo: prev.0,
                    hi,
                    s_lo: prev.1,
                    s_hi: s,
                });
            }
            if s < level {
                break;
            }
            prev = (hi, s);
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::InversionFailure { level });
            }
        }
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.survival(mid) < level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(QuantileResult {
            n,
            u_n: 0.5 * (lo + hi),
            bracket_width: hi - lo,
            closed_form: false,
        })
    }

    /// `E[|X|^p 1(a < |X|^p <= b)] = a P(Y>a) - b P(Y>b) + int_a^b P(Y>t) dt`
    /// with `Y = |X|^p`.
    pub fn truncated_p_moment(&self, p: f64, a: f64, b: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("exponent p={p}")));
        }
        if !(0.0 <= a && a <= b && b.is_finite()) {
            return Err(Error::Domain(format!("truncation window [{a}, {b}]")));
        }
        if a == b {
            return Ok(0.0);
        }
        let breaks = self.power_breakpoints(p);
        let integral = integrate(
            |t| self.power_survival(p, t),
            a,
            b,
            &breaks,
            &QuadOptions::default(),
        )?;
        let value = a * self.power_survival(p, a) - b * self.power_survival(p, b) + integral;
        Ok(value.max(0.0))
    }

    /// Breakpoints mapped to the `|X|^p` scale.
    pub fn power_breakpoints(&self, p: f64) -> Vec<f64> {
        self.breakpoints().into_iter().map(|t| t.powf(p)).collect()
    }

    /// Table of `G(t) = int_0^t P(|X|^p > s) ds` on a geometric grid up to `t_max`.
    pub fn cumulative_tail_table(&self, p: f64, t_max: f64, points: usize) -> Result<CumulativeTailTable> {
        CumulativeTailTable::build(self.clone(), p, t_max, points)
    }
}

fn check_monotone(grid: &[f64], s: impl Fn(f64) -> f64) -> Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    for &t in grid {
        let v = s(t);
        if !(v >= 0.0) {
            return Err(Error::InvalidModel(format!("survival {v} at t={t}")));
        }
        if let Some((t0, v0)) = prev {
            if v > v0 * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::NonMonotoneTail {
                    lo: t0,
                    hi: t,
                    s_lo: v0,
                    s_hi: v,
                });
            }
        }
        prev = Some((t, v));
    }
    Ok(())
}
