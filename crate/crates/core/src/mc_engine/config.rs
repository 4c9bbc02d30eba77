use serde::{Deserialize, Serialize};

use crate::banach_lp::ProbeRule;
use crate::error::{Error, Result};
use crate::tail_models::ModelRef;

/// Which summands are simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceSpec {
    /// I.i.d. real summands with the given tail.
    Iid { model: ModelRef },
    /// `V_n = eps_n e_n` in `l_p`: disjoint unit coordinates with random signs.
    LpCounterexample,
    /// `X_k = x_k eps_k` for a bounded deterministic sequence `x_k` in `l_p`.
    LpProbe { rule: ProbeRule },
}

/// Truncation level for the truncated-component series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Threshold {
    /// `|X_i| <= u_n`.
    #[default]
    Quantile,
    /// `|X_i| <= level` for every `n`.
    Fixed { level: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Plain,
    /// `X - X'` with `X'` an independent copy.
    Symmetrized,
    /// `U_{n,n} = sum_{i <= n} X_i 1(|X_i| <= threshold_n)` at each checkpoint.
    Truncated {
        #[serde(default)]
        threshold: Threshold,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    pub p: f64,
    pub q: f64,
    /// Power of two, at least `2^10`.
    pub n_max: u64,
    pub replications: usize,
    pub master_seed: u64,
    /// Defaults to the dyadic grid `1, 2, 4, ..., n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilon_grid: Vec<f64>,
    #[serde(default)]
    pub mode: Mode,
}

pub const MIN_N_MAX: u64 = 1 << 10;

pub fn dyadic_grid(n_max: u64) -> Vec<u64> {
    (0..64).map(|k| 1u64 << k).take_while(|&n| n <= n_max).collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.p > 0.0 && self.p < 2.0) {
            return bad(format!("p must lie in (0, 2), got {}", self.p));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return bad(format!("q must be positive, got {}", self.q));
        }
        if !self.n_max.is_power_of_two() || self.n_max < MIN_N_MAX {
            return bad(format!(
                "n_max must be a power of two >= {MIN_N_MAX}, got {}",
                self.n_max
            ));
        }
        if self.replications < 2 {
            return bad(format!("need at least 2 replications, got {}", self.replications));
        }
        if let Some(cps) = &self.checkpoints {
            if cps.is_empty() {
                return bad("checkpoint list is empty".into());
            }
            if cps[0] < 1 || *cps.last().unwrap() > self.n_max {
                return bad(format!("checkpoints must lie in [1, {}]", self.n_max));
            }
            if cps.windows(2).any(|w| w[0] >= w[1]) {
                return bad("checkpoints must be strictly increasing".into());
            }
        }
        if self.epsilon_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("epsilon grid entries must be positive".into());
        }
        match (&self.sequence, self.mode) {
            (SequenceSpec::Iid { model }, _) => {
                model.build()?;
            }
            (_, Mode::Truncated { .. }) => {
                return bad("truncated mode needs an i.i.d. tail model".into());
            }
            (SequenceSpec::LpProbe { rule }, _) => rule.validate()?,
            _ => {}
        }
        if let Mode::Truncated {
            threshold: Threshold::Fixed { level },
        } = self.mode
        {
            if !(level >= 0.0) {
                return bad(format!("truncation level must be >= 0, got {level}"));
            }
        }
        Ok(())
    }

    pub fn resolved_checkpoints(&self) -> Vec<u64> {
        self.checkpoints
            .clone()
            .unwrap_or_else(|| dyadic_grid(self.n_max))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
