use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sequence::{LpSequence, ProbeRule};
use crate::criteria::Verdict;
use crate::error::{Error, Result};
use crate::mc_engine::{
    dyadic_grid, growth_verdict, replication_rng, run_sequence, summarize, ExperimentConfig, GrowthSeries,
    Moments, Sequence, SequenceSpec, Stream,
};
use crate::numeric::NeumaierSum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexamplePath {
    pub p: f64,
    pub q: f64,
    /// `r_n` for `n = 1..=n_max`.
    pub ratios: Vec<f64>,
    /// `W_n` at dyadic `n`.
    pub w_dyadic: Vec<(u64, f64)>,
    pub w_verdict: Verdict,
}

/// Simulates `V_n = eps_n e_n` in `l_p` for one seed. The ratios are exactly 1 because
/// `||S_n||^p` accumulates the integer count `n`; the signs are drawn regardless.
pub fn counterexample_path(n_max: u64, p: f64, q: f64, seed: u64) -> Result<CounterexamplePath> {
    if n_max < 1 {
        return Err(Error::InvalidConfig("n_max must be at least 1".into()));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidConfig(format!("q must be positive, got {q}")));
    }
    let seq = LpSequence::try_new(ProbeRule::DisjointUnits, p)?;
    let mut rng: ChaCha8Rng = replication_rng(seed, 0, Stream::Main);
    let inv_p = 1.0 / p;
    let mut acc = seq.zero();
    let mut w = NeumaierSum::default();
    let mut ratios = Vec::with_capacity(n_max as usize);
    let mut w_dyadic = Vec::new();
    for n in 1..=n_max {
        let x = seq.draw(n, &mut rng);
        seq.accumulate(&mut acc, &x, 1.0);
        let r = seq.norm(&acc) / (n as f64).powf(inv_p);
        w.add(r.powf(q) / n as f64);
        ratios.push(r);
        if n.is_power_of_two() {
            w_dyadic.push((n, w.value()));
        }
    }
    let w_verdict = growth_verdict(&GrowthSeries::from_partials(
        w_dyadic.iter().map(|v| v.0).collect(),
        w_dyadic.iter().map(|v| v.1).collect(),
    ));
    Ok(CounterexamplePath {
        p,
        q,
        ratios,
        w_dyadic,
        w_verdict,
    })
}

/// Monte Carlo size of a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub n_max: u64,
    pub replications: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub rule: ProbeRule,
    pub p: f64,
    pub q: f64,
    pub n: Vec<u64>,
    /// Statistics of `||sum_{k <= n} x_k eps_k|| / n^{1/p}` across replications.
    pub ratio: Vec<Moments>,
    /// Statistics of `W_n`.
    pub w: Vec<Moments>,
    pub w_verdict: Verdict,
}

/// Rademacher sums `sum x_k eps_k` for a bounded coefficient rule: ratio decay and the
/// pathwise `W` verdict. Evidence for specific witnesses only.
pub fn rademacher_probe(
    rule: ProbeRule,
    p: f64,
    q: f64,
    settings: ProbeSettings,
    workers: Option<usize>,
) -> Result<ProbeReport> {
    let cfg = ExperimentConfig {
        sequence: SequenceSpec::LpProbe { rule: rule.clone() },
        p,
        q,
        n_max: settings.n_max,
        replications: settings.replications,
        master_seed: settings.master_seed,
        checkpoints: Some(dyadic_grid(settings.n_max)),
        epsilon_grid: Vec::new(),
        mode: Default::default(),
    };
    cfg.validate()?;
    let seq = LpSequence::try_new(rule.clone(), p)?;
    let table = run_sequence(&seq, &cfg, workers, false)?;
    let summary = summarize(&table, &cfg);
    let ratio = table
        .checkpoints
        .iter()
        .map(|&n| Moments::of(&table.column_at(n, |r| r.ratio)))
        .collect();
    Ok(ProbeReport {
        rule,
        p,
        q,
        n: table.checkpoints.clone(),
        ratio,
        w: summary.estimates.iter().map(|e| e.w).collect(),
        w_verdict: summary.w_verdict,
    })
}
