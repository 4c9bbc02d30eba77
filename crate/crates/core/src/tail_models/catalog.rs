//! Closed-form tail pieces.
//!
//! Every piece evaluates `c * t^-a * (ln t)^-b * (ln ln t)^-d` on `[t_lo, t_hi)`, with the
//! catalog id restricting which exponents may be non-zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    Constant,
    Power,
    PowerLog,
    PowerLogLoglog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaParams {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub d: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formula {
    #[serde(rename = "formula_id")]
    pub id: FormulaId,
    pub params: FormulaParams,
}

impl Formula {
    pub fn constant(c: f64) -> Self {
        Self {
            id: FormulaId::Constant,
            params: FormulaParams {
                c,
                a: 0.0,
                b: 0.0,
                d: 0.0,
            },
        }
    }

    pub fn power(c: f64, a: f64) -> Self {
        Self {
            id: FormulaId::Power,
            params: FormulaParams { c, a, b: 0.0, d: 0.0 },
        }
    }

    pub fn power_log(c: f64, a: f64, b: f64) -> Self {
        Self {
            id: FormulaId::PowerLog,
            params: FormulaParams { c, a, b, d: 0.0 },
        }
    }

    pub fn power_log_loglog(c: f64, a: f64, b: f64, d: f64) -> Self {
        Self {
            id: FormulaId::PowerLogLoglog,
            params: FormulaParams { c, a, b, d },
        }
    }

    pub fn check(&self) -> Result<()> {
        let FormulaParams { c, a, b, d } = self.params;
        if !(c.is_finite() && a.is_finite() && b.is_finite() && d.is_finite()) {
            return Err(Error::InvalidModel("non-finite formula parameter".into()));
        }
        if c < 0.0 {
            return Err(Error::InvalidModel(format!("negative scale c={c}")));
        }
        let extra = match self.id {
            FormulaId::Constant => a != 0.0 || b != 0.0 || d != 0.0,
            FormulaId::Power => b != 0.0 || d != 0.0,
            FormulaId::PowerLog => d != 0.0,
            FormulaId::PowerLogLoglog => false,
        };
        if extra {
            return Err(Error::InvalidModel(format!(
                "parameters not allowed for formula {:?}",
                self.id
            )));
        }
        Ok(())
    }

    /// Smallest `t` at which the formula is defined.
    pub fn domain_start(&self) -> f64 {
        let p = self.params;
        if p.d != 0.0 {
            std::f64::consts::E
        } else if p.b != 0.0 {
            1.0
        } else {
            0.0
        }
    }

    /// `ln` of the formula value; `-inf` for a zero scale.
    #[inline]
    pub fn ln_eval(&self, t: f64) -> f64 {
        let p = self.params;
        if p.c == 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut v = p.c.ln();
        if p.a != 0.0 {
            v -= p.a * t.ln();
        }
        if p.b != 0.0 || p.d != 0.0 {
            let l = t.ln();
            if p.b != 0.0 {
                v -= p.b * l.ln();
            }
            if p.d != 0.0 {
                v -= p.d * l.ln().ln();
            }
        }
        v
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self.id {
            FormulaId::Constant => self.params.c,
            FormulaId::Power if self.params.a == 0.0 => self.params.c,
            _ => self.ln_eval(t).exp(),
        }
    }

    /// Value as `t -> +inf`.
    pub fn limit_at_infinity(&self) -> f64 {
        let p = self.params;
        if p.c == 0.0 {
            return 0.0;
        }
        let key = [p.a, p.b, p.d];
        match key.iter().find(|&&e| e != 0.0) {
            None => p.c,
            Some(&e) if e > 0.0 => 0.0,
            Some(_) => f64::INFINITY,
        }
    }

    pub fn is_constant(&self) -> bool {
        let p = self.params;
        p.c == 0.0 || (p.a == 0.0 && p.b == 0.0 && p.d == 0.0)
    }

    /// Solves `formula(t) = level` for `t` in `[lo, hi]` assuming the formula is
    /// strictly decreasing there and `formula(lo) >= level >= formula(hi)`.
    pub fn solve_decreasing(&self, level: f64, lo: f64, hi: f64) -> f64 {
        let p = self.params;
        if p.b == 0.0 && p.d == 0.0 && p.a > 0.0 {
            let t = (p.c / level).powf(1.0 / p.a);
            return t.clamp(lo, hi);
        }
        // Work in s = ln t with a safeguarded Newton iteration.
        let target = level.ln();
        let g = |s: f64| self.ln_eval(s.exp()) - target;
        let mut s_lo = lo.max(self.domain_start()).ln();
        if !s_lo.is_finite() {
            s_lo = f64::MIN_POSITIVE.ln();
        }
        // Leading-power guess; the log factors only move the root down when b, d >= 0.
        let guess = if p.a > 0.0 {
            ((p.c.ln() - target) / p.a).max(s_lo)
        } else {
            s_lo.max(0.0) + 1.0
        };
        let mut s_hi = if hi.is_finite() {
            hi.ln()
        } else {
            // Expand until the level is crossed.
            let mut s = guess.max(s_lo + 1e-9);
            let mut step = 1.0;
            while g(s) > 0.0 && s < 700.0 {
                s += step;
                step *= 2.0;
            }
            s.min(709.0)
        };
        if g(s_hi) > 0.0 {
            return s_hi.exp();
        }
        if g(s_lo) <= 0.0 {
            return s_lo.exp();
        }
        let mut s = if guess > s_lo && guess < s_hi {
            guess
        } else {
            0.5 * (s_lo + s_hi)
        };
        for _ in 0..200 {
            let gs = g(s);
            if gs > 0.0 {
                s_lo = s;
            } else {
                s_hi = s;
            }
            let tol = 1e-15 * s.abs().max(1.0);
            if s_hi - s_lo <= tol {
                break;
            }
            // d/ds ln f = -a - b/ln t - d/(ln t ln ln t), with ln t = s.
            let mut deriv = -p.a;
            if p.b != 0.0 && s > 0.0 {
                deriv -= p.b / s;
            }
            if p.d != 0.0 && s > 1.0 {
                deriv -= p.d / (s * s.ln());
            }
            let newton = s - gs / deriv;
            if deriv < 0.0 && newton > s_lo && newton < s_hi {
                let done = (newton - s).abs() <= tol;
                s = newton;
                if done {
                    break;
                }
            } else {
                s = 0.5 * (s_lo + s_hi);
            }
        }
        s.exp()
    }
}

/// A catalog formula restricted to `[t_lo, t_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub t_lo: f64,
    /// `None` in JSON stands for `+inf`.
    #[serde(with = "infinite_as_null")]
    pub t_hi: f64,
    #[serde(flatten)]
    pub formula: Formula,
}

impl Piece {
    pub fn new(t_lo: f64, t_hi: f64, formula: Formula) -> Self {
        Self { t_lo, t_hi, formula }
    }

    /// Value at the left end of the piece.
    pub fn value_at_start(&self) -> f64 {
        self.formula.eval(self.t_lo)
    }

    /// Left limit at the right end of the piece.
    pub fn value_at_end(&self) -> f64 {
        if self.t_hi.is_infinite() {
            self.formula.limit_at_infinity()
        } else {
            self.formula.eval(self.t_hi)
        }
    }
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
