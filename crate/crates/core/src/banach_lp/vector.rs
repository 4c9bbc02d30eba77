use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite-support vector in `l_p`, `0 < p <= 2`. Zero entries are never stored.
///
/// For `p < 1` the "norm" is the quasi-norm `(sum |v_i|^p)^{1/p}`; nothing here relies on
/// the triangle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpVector {
    p: f64,
    entries: BTreeMap<u64, f64>,
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("l_p exponent must lie in (0, 2], got {p}")))
    }
}

impl LpVector {
    pub fn zero(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self {
            p,
            entries: BTreeMap::new(),
        })
    }

    pub fn from_entries(p: f64, entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut v = Self::zero(p)?;
        for (i, x) in entries {
            v.add_at(i, x);
        }
        Ok(v)
    }

    /// The `i`-th unit coordinate vector.
    pub fn unit(p: f64, i: u64) -> Result<Self> {
        Self::from_entries(p, [(i, 1.0)])
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn get(&self, i: u64) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.entries.iter().map(|(&i, &x)| (i, x))
    }

    /// `v_i += x`, dropping the entry if it becomes zero.
    pub fn add_at(&mut self, i: u64, x: f64) {
        if x == 0.0 {
            return;
        }
        let e = self.entries.entry(i).or_insert(0.0);
        *e += x;
        if *e == 0.0 {
            self.entries.remove(&i);
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self {
                p: self.p,
                entries: BTreeMap::new(),
            };
        }
        Self {
            p: self.p,
            entries: self.entries.iter().map(|(&i, &x)| (i, c * x)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.entries() {
            out.add_at(i, x);
        }
        out
    }

    /// `sum |v_i|^p`
    pub fn norm_p(&self) -> f64 {
        self.entries.values().map(|x| x.abs().powf(self.p)).sum()
    }

    pub fn lp_norm(&self) -> f64 {
        lp_norm(self)
    }
}

/// `(sum |v_i|^p)^{1/p}`, scaled by the largest entry to avoid overflow.
pub fn lp_norm(v: &LpVector) -> f64 {
    let m = v.entries.values().fold(0.0f64, |a, x| a.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = v.entries.values().map(|x| (x.abs() / m).powf(v.p)).sum();
    m * s.powf(1.0 / v.p)
}
