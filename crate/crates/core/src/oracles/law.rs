use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite law with exact rational probabilities. Values are floating point; sums of
/// values are exact whenever they are representable (integers, dyadic fractions).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaw {
    /// Distinct values in increasing order, with positive probabilities summing to 1.
    atoms: Vec<(f64, BigRational)>,
}

/// Human-readable form used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub values: Vec<f64>,
    pub probs: Vec<String>,
}

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
struct Key(i64);

impl Key {
    // Order-preserving map of non-NaN floats to integers; -0.0 and 0.0 share a key.
    fn of(x: f64) -> Self {
        let x = if x == 0.0 { 0.0 } else { x };
        let b = x.to_bits() as i64;
        Key(if b < 0 { i64::MIN - b } else { b })
    }

    fn value(self) -> f64 {
        let b = if self.0 < 0 { i64::MIN - self.0 } else { self.0 };
        f64::from_bits(b as u64)
    }
}

pub(crate) fn collect(atoms: impl IntoIterator<Item = (f64, BigRational)>) -> Vec<(f64, BigRational)> {
    let mut map: BTreeMap<Key, BigRational> = BTreeMap::new();
    for (v, p) in atoms {
        if p.is_zero() {
            continue;
        }
        *map.entry(Key::of(v)).or_insert_with(BigRational::zero) += p;
    }
    map.into_iter().map(|(k, p)| (k.value(), p)).collect()
}

impl DiscreteLaw {
    /// Exact law; probabilities must be nonnegative and sum to exactly 1.
    pub fn new(atoms: Vec<(f64, BigRational)>) -> Result<Self> {
        if atoms.iter().any(|(v, _)| !v.is_finite()) {
            return Err(Error::Domain("atom values must be finite".into()));
        }
        if atoms.iter().any(|(_, p)| p.is_negative()) {
            return Err(Error::Domain("negative probability".into()));
        }
        let total: BigRational = atoms.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("probabilities sum to {}", total)));
        }
        Ok(Self {
            atoms: collect(atoms),
        })
    }

    /// Law from floating-point probabilities, taken at their exact binary values. The sum
    /// must be within 1e-15 of 1; the last atom absorbs the residue so the law is exact.
    pub fn from_f64(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("empty law".into()));
        }
        let mut exact = atoms
            .iter()
            .map(|&(v, p)| Ok((v, rational(p)?)))
            .collect::<Result<Vec<_>>>()?;
        let total: BigRational = exact.iter().map(|(_, p)| p.clone()).sum();
        let residue = BigRational::one() - total;
        if to_f64(&residue).abs() > 1e-15 {
            return Err(Error::Domain(format!(
                "probabilities sum to {} (tolerance 1e-15)",
                1.0 - to_f64(&residue)
            )));
        }
        exact.last_mut().expect("nonempty").1 += residue;
        Self::new(exact)
    }

    pub fn point(value: f64) -> Self {
        Self::new(vec![(value, BigRational::one())]).expect("point mass")
    }

    pub fn rademacher() -> Self {
        Self::new(vec![(-1.0, ratio(1, 2)), (1.0, ratio(1, 2))]).expect("rademacher")
    }

    /// `c` with probability `theta`, 0 otherwise.
    pub fn scaled_bernoulli(c: f64, theta: BigRational) -> Result<Self> {
        let rest = BigRational::one() - &theta;
        Self::new(vec![(0.0, rest), (c, theta)])
    }

    pub fn atoms(&self) -> &[(f64, BigRational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.iter().map(|(_, p)| p.clone()).sum()
    }

    /// `P(X > t)`.
    pub fn tail(&self, t: f64) -> BigRational {
        self.atoms
            .iter()
            .filter(|(v, _)| *v > t)
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// `E f(X)` with `f` values taken exactly.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (v, p) in &self.atoms {
            acc += rational(f(*v))? * p;
        }
        Ok(acc)
    }

    /// Law of `X - X'` with `X'` an independent copy.
    pub fn symmetrized(&self) -> Self {
        let pairs = self
            .atoms
            .iter()
            .flat_map(|(a, pa)| self.atoms.iter().map(move |(b, pb)| (a - b, pa * pb)));
        Self {
            atoms: collect(pairs),
        }
    }

    pub fn summary(&self) -> LawSummary {
        LawSummary {
            values: self.atoms.iter().map(|a| a.0).collect(),
            probs: self.atoms.iter().map(|a| a.1.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_preserve_order() {
        let xs = [-3.5, -1.0, -0.0, 0.0, 1e-300, 2.0, 7.25];
        for w in xs.windows(2) {
            assert!(Key::of(w[0]) <= Key::of(w[1]));
            assert_eq!(Key::of(w[1]).value(), w[1]);
        }
    }

    #[test]
    fn symmetrized_rademacher() {
        let s = DiscreteLaw::rademacher().symmetrized();
        let vals: Vec<f64> = s.atoms().iter().map(|a| a.0).collect();
        assert_eq!(vals, vec![-2.0, 0.0, 2.0]);
        assert_eq!(s.atoms()[1].1, ratio(1, 2));
        assert!(s.total_mass().is_one());
    }

    #[test]
    fn float_probabilities_within_tolerance() {
        let law = DiscreteLaw::from_f64(&[(0.0, 0.1), (1.0, 0.2), (2.0, 0.7)]).unwrap();
        assert!(law.total_mass().is_one());
        assert!(DiscreteLaw::from_f64(&[(0.0, 0.5), (1.0, 0.4)]).is_err());
    }
}
