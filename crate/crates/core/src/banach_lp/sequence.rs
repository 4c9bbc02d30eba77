use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vector::check_p;
use crate::error::{Error, Result};
use crate::mc_engine::Sequence;

/// Deterministic coefficient sequence `x_k` for the Rademacher sums `sum x_k eps_k`.
/// Every rule has `sup_k ||x_k|| <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ProbeRule {
    /// `x_k = 0`.
    Zero,
    /// `x_k = e_k`.
    DisjointUnits,
    /// `x_k = e_index` for every `k`.
    Repeated { index: u64 },
}

impl ProbeRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProbeRule::Repeated { index: 0 } => {
                Err(Error::InvalidConfig("coordinates are numbered from 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Declared bound on `||x_k||`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            ProbeRule::Zero => 0.0,
            _ => 1.0,
        }
    }

    /// Support coordinate of `x_k`, `None` for the zero vector.
    #[inline]
    pub fn coordinate(&self, k: u64) -> Option<u64> {
        match *self {
            ProbeRule::Zero => None,
            ProbeRule::DisjointUnits => Some(k),
            ProbeRule::Repeated { index } => Some(index),
        }
    }
}

/// `X_k = x_k eps_k` with independent signs `eps_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSequence {
    pub rule: ProbeRule,
    pub p: f64,
}

/// Partial sum with `sum |v_i|^p` maintained incrementally.
#[derive(Debug, Clone, Default)]
pub struct LpAccumulator {
    entries: BTreeMap<u64, f64>,
    norm_p: f64,
}

/// Supports at most this large are re-summed exactly after every update.
const EXACT_SUPPORT: usize = 4;

impl LpSequence {
    /// Panics on an invalid exponent; use [`LpSequence::try_new`] for checked input.
    pub fn new(rule: ProbeRule, p: f64) -> Self {
        Self::try_new(rule, p).expect("valid l_p sequence")
    }

    pub fn try_new(rule: ProbeRule, p: f64) -> Result<Self> {
        check_p(p)?;
        rule.validate()?;
        Ok(Self { rule, p })
    }

    /// `V_n = eps_n e_n`: disjoint unit coordinates.
    pub fn counterexample(p: f64) -> Self {
        Self::new(ProbeRule::DisjointUnits, p)
    }
}

impl Sequence for LpSequence {
    /// `(coordinate, value)`; `None` is the zero vector.
    type Item = Option<(u64, f64)>;
    type Acc = LpAccumulator;

    fn zero(&self) -> LpAccumulator {
        LpAccumulator::default()
    }

    #[inline]
    fn draw(&self, n: u64, rng: &mut ChaCha8Rng) -> Self::Item {
        // The sign is consumed even for zero coefficients so streams stay aligned.
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        self.rule.coordinate(n).map(|i| (i, sign))
    }

    fn magnitude(&self, item: &Self::Item) -> f64 {
        item.map_or(0.0, |(_, x)| x.abs())
    }

    fn accumulate(&self, acc: &mut LpAccumulator, item: &Self::Item, weight: f64) {
        let Some((i, x)) = *item else { return };
        let delta = weight * x;
        if delta == 0.0 {
            return;
        }
        let old = acc.entries.get(&i).copied().unwrap_or(0.0);
        let new = old + delta;
        if new == 0.0 {
            acc.entries.remove(&i);
        } else {
            acc.entries.insert(i, new);
        }
        if acc.entries.len() <= EXACT_SUPPORT {
            acc.norm_p = acc.entries.values().map(|v| v.abs().powf(self.p)).sum();
        } else {
            acc.norm_p += new.abs().powf(self.p) - old.abs().powf(self.p);
        }
    }

    fn norm(&self, acc: &LpAccumulator) -> f64 {
        if acc.norm_p <= 0.0 {
            return 0.0;
        }
        if acc.entries.len() == 1 {
            return acc.entries.values().next().map_or(0.0, |v| v.abs());
        }
        acc.norm_p.powf(1.0 / self.p)
    }
}

impl LpAccumulator {
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn norm_p(&self) -> f64 {
        self.norm_p
    }
}
