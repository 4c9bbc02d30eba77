use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{dyadic_grid, ExperimentConfig, Mode, SequenceSpec, Threshold};
use super::growth::{growth_verdict, GrowthSeries};
use super::rng::{replication_rng, Stream};
use super::sequence::{IidReal, Sequence};
use crate::banach_lp::LpSequence;
use crate::criteria::Verdict;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::tail_models::TailModel;

/// Norms above this are treated as overflow.
pub const OVERFLOW_LIMIT: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub n: u64,
    pub s_norm: f64,
    /// `||S_n|| / n^{1/p}`
    pub ratio: f64,
    /// `sum_{m <= n} ratio_m^q / m` over every `m`, not only checkpoints.
    pub w_partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPath {
    pub replication: usize,
    pub rows: Vec<CheckpointRow>,
    /// First index at which the norm left the floating-point safe range.
    pub overflow_at: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointTable {
    pub p: f64,
    pub q: f64,
    pub n_max: u64,
    pub checkpoints: Vec<u64>,
    pub paths: Vec<ReplicationPath>,
}

pub const CSV_HEADER: &str = "replication,n,s_norm,ratio,w_partial";

impl CheckpointTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for path in &self.paths {
            for row in &path.rows {
                writeln!(
                    out,
                    "{},{},{:e},{:e},{:e}",
                    path.replication, row.n, row.s_norm, row.ratio, row.w_partial
                )?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Replications that overflowed, with the index at which they did.
    pub fn censored(&self) -> Vec<(usize, u64)> {
        self.paths
            .iter()
            .filter_map(|p| p.overflow_at.map(|n| (p.replication, n)))
            .collect()
    }

    /// Paths that completed without overflow.
    pub fn complete_paths(&self) -> impl Iterator<Item = &ReplicationPath> {
        self.paths.iter().filter(|p| p.overflow_at.is_none())
    }

    /// Values of `f(row)` at checkpoint `n` across complete paths, in replication order.
    pub fn column_at(&self, n: u64, f: impl Fn(&CheckpointRow) -> f64) -> Vec<f64> {
        let Some(i) = self.checkpoints.iter().position(|&c| c == n) else {
            return Vec::new();
        };
        self.complete_paths().map(|p| f(&p.rows[i])).collect()
    }
}

/// Runs `f` on a dedicated pool with `workers` threads (`None`: rayon's default).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("worker count must be positive".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn simulate_path<S: Sequence>(
    seq: &S,
    cfg: &ExperimentConfig,
    checkpoints: &[u64],
    replication: usize,
    symmetrized: bool,
) -> ReplicationPath {
    let mut rng = replication_rng(cfg.master_seed, replication as u64, Stream::Main);
    let mut copy = replication_rng(cfg.master_seed, replication as u64, Stream::Copy);
    let inv_p = 1.0 / cfg.p;
    let last = *checkpoints.last().unwrap_or(&0);
    let mut acc = seq.zero();
    let mut w = NeumaierSum::default();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut overflow_at = None;
    for n in 1..=last {
        let x = seq.draw(n, &mut rng);
        seq.accumulate(&mut acc, &x, 1.0);
        if symmetrized {
            let x2 = seq.draw(n, &mut copy);
            seq.accumulate(&mut acc, &x2, -1.0);
        }
        let norm = seq.norm(&acc);
        if !(norm <= OVERFLOW_LIMIT) {
            overflow_at = Some(n);
            break;
        }
        let ratio = norm / (n as f64).powf(inv_p);
        if ratio > 0.0 {
            w.add(ratio.powf(cfg.q) / n as f64);
        }
        if checkpoints[next] == n {
            rows.push(CheckpointRow {
                n,
                s_norm: norm,
                ratio,
                w_partial: w.value(),
            });
            next += 1;
        }
    }
    ReplicationPath {
        replication,
        rows,
        overflow_at,
    }
}

/// Simulates every replication of `seq`; the result is independent of the worker count.
pub fn run_sequence<S: Sequence>(
    seq: &S,
    cfg: &ExperimentConfig,
    workers: Option<usize>,
    symmetrized: bool,
) -> Result<CheckpointTable> {
    let checkpoints = cfg.resolved_checkpoints();
    let paths = with_workers(workers, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| simulate_path(seq, cfg, &checkpoints, r, symmetrized))
            .collect::<Vec<_>>()
    })?;
    Ok(CheckpointTable {
        p: cfg.p,
        q: cfg.q,
        n_max: cfg.n_max,
        checkpoints,
        paths,
    })
}

fn dispatch(cfg: &ExperimentConfig, workers: Option<usize>, symmetrized: bool) -> Result<CheckpointTable> {
    cfg.validate()?;
    match &cfg.sequence {
        SequenceSpec::Iid { model } => {
            let model = model.build()?;
            run_sequence(&IidReal { model: &model }, cfg, workers, symmetrized)
        }
        SequenceSpec::LpCounterexample => {
            run_sequence(&LpSequence::counterexample(cfg.p), cfg, workers, symmetrized)
        }
        SequenceSpec::LpProbe { rule } => {
            run_sequence(&LpSequence::new(rule.clone(), cfg.p), cfg, workers, symmetrized)
        }
    }
}

/// Streams `S_n`, `r_n` and `W_n` for every replication of `cfg`.
pub fn run_paths(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<CheckpointTable> {
    dispatch(cfg, workers, false)
}

/// As [`run_paths`] with `X` replaced by `X - X'`.
pub fn symmetrize_run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<CheckpointTable> {
    dispatch(cfg, workers, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtemadiRow {
    pub n: u64,
    pub epsilon: f64,
    /// Empirical `P(||X_{n+1} + ... + X_{2n}|| > n^{1/p} eps)`.
    pub probability: f64,
    pub se: f64,
    /// Dyadic partial sum of `(1/m) P(...)` over `m <= n`.
    pub partial: f64,
    pub partial_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtemadiReport {
    pub rows: Vec<EtemadiRow>,
    /// One growth verdict per epsilon, in grid order.
    pub verdicts: Vec<(f64, Verdict)>,
}

/// `H(b) - H(a)` for `a < b`.
pub fn harmonic_weight(a: u64, b: u64) -> f64 {
    if b - a <= 64 {
        return ((a + 1)..=b).map(|m| 1.0 / m as f64).sum();
    }
    // Euler-Maclaurin for the difference of harmonic numbers.
    let h = |n: f64| n.ln() + 0.5 / n - 1.0 / (12.0 * n * n) + 1.0 / (120.0 * n.powi(4));
    h(b as f64) - h(a as f64)
}

fn block_norms<S: Sequence>(seq: &S, cfg: &ExperimentConfig, r: usize, sizes: &[u64]) -> Vec<f64> {
    let mut rng = replication_rng(cfg.master_seed, r as u64, Stream::Blocks);
    sizes
        .iter()
        .map(|&n| {
            let mut acc = seq.zero();
            for i in (n + 1)..=(2 * n) {
                let x = seq.draw(i, &mut rng);
                seq.accumulate(&mut acc, &x, 1.0);
            }
            seq.norm(&acc)
        })
        .collect()
}

fn etemadi_with<S: Sequence>(
    seq: &S,
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<EtemadiReport> {
    let sizes: Vec<u64> = dyadic_grid(cfg.n_max / 2);
    let norms: Vec<Vec<f64>> = with_workers(workers, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| block_norms(seq, cfg, r, &sizes))
            .collect()
    })?;
    let reps = cfg.replications as f64;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &eps in &cfg.epsilon_grid {
        let mut partial = 0.0;
        let mut var = 0.0;
        let mut prev = 0;
        let mut series = Vec::new();
        for (j, &n) in sizes.iter().enumerate() {
            let level = (n as f64).powf(1.0 / cfg.p) * eps;
            let hits = norms.iter().filter(|v| v[j] > level).count() as f64;
            let prob = hits / reps;
            let se = (prob * (1.0 - prob) / reps).sqrt();
            let weight = harmonic_weight(prev, n);
            partial += weight * prob;
            var += (weight * se).powi(2);
            prev = n;
            rows.push(EtemadiRow {
                n,
                epsilon: eps,
                probability: prob,
                se,
                partial,
                partial_se: var.sqrt(),
            });
            series.push((n, partial, weight * se));
        }
        let g = GrowthSeries::from_partials_with_se(
            series.iter().map(|s| s.0).collect(),
            series.iter().map(|s| s.1).collect(),
            series.iter().map(|s| s.2).collect(),
        );
        verdicts.push((eps, growth_verdict(&g)));
    }
    Ok(EtemadiReport { rows, verdicts })
}

/// Block probabilities `P(||sum_{i=n+1}^{2n} X_i|| > n^{1/p} eps)` at dyadic `n` from
/// fresh blocks, with their harmonic-weighted partial sums.
pub fn etemadi_blocks(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<EtemadiReport> {
    cfg.validate()?;
    if cfg.epsilon_grid.is_empty() {
        return Err(Error::InvalidConfig("epsilon grid is empty".into()));
    }
    match &cfg.sequence {
        SequenceSpec::Iid { model } => {
            let model = model.build()?;
            etemadi_with(&IidReal { model: &model }, cfg, workers)
        }
        SequenceSpec::LpCounterexample => etemadi_with(&LpSequence::counterexample(cfg.p), cfg, workers),
        SequenceSpec::LpProbe { rule } => etemadi_with(&LpSequence::new(rule.clone(), cfg.p), cfg, workers),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedRow {
    pub n: u64,
    pub threshold: f64,
    /// Mean of `||U_{n,n}||^q` across replications.
    pub mean_moment: f64,
    pub se: f64,
    /// `mean_moment / n^{1 + q/p}`
    pub term: f64,
    /// Block partial sums with right-edge (lower) and left-edge (upper) terms.
    pub partial_lower: f64,
    pub partial_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedReport {
    pub rows: Vec<TruncatedRow>,
    pub verdict: Verdict,
}

/// Monte Carlo estimate of `sum_n E||U_{n,n}||^q / n^{1 + q/p}` with
/// `U_{n,n} = sum_{i <= n} X_i 1(|X_i| <= u_n)` at dyadic `n`.
pub fn truncated_component_series(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<TruncatedReport> {
    cfg.validate()?;
    let SequenceSpec::Iid { model } = &cfg.sequence else {
        return Err(Error::InvalidConfig(
            "truncated series needs an i.i.d. tail model".into(),
        ));
    };
    let model = model.build()?;
    let rule = match cfg.mode {
        Mode::Truncated { threshold } => threshold,
        _ => Threshold::Quantile,
    };
    let sizes = dyadic_grid(cfg.n_max);
    let thresholds = sizes
        .iter()
        .map(|&n| match rule {
            Threshold::Quantile => model.quantile_un(n).map(|q| q.u_n),
            Threshold::Fixed { level } => Ok(level),
        })
        .collect::<Result<Vec<f64>>>()?;
    let moments: Vec<Vec<f64>> = with_workers(workers, || {
        (0..cfg.replications)
            .into_par_iter()
            .map(|r| truncated_moments(&model, cfg, r, &sizes, &thresholds))
            .collect()
    })?;
    let reps = cfg.replications as f64;
    let mut rows = Vec::with_capacity(sizes.len());
    let (mut lower, mut upper) = (0.0, 0.0);
    let mut prev_term: Option<f64> = None;
    let mut prev_n = 0;
    let mut series_se = Vec::new();
    for (j, &n) in sizes.iter().enumerate() {
        let col: Vec<f64> = moments.iter().map(|m| m[j]).collect();
        let mean = col.iter().sum::<f64>() / reps;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0);
        let se = (var / reps).sqrt();
        let scale = (n as f64).powf(1.0 + cfg.q / cfg.p);
        let term = mean / scale;
        let count = (n - prev_n) as f64;
        let left = prev_term.unwrap_or(term);
        lower += count * term.min(left);
        upper += count * term.max(left);
        series_se.push(count * se / scale);
        prev_term = Some(term);
        prev_n = n;
        rows.push(TruncatedRow {
            n,
            threshold: thresholds[j],
            mean_moment: mean,
            se,
            term,
            partial_lower: lower,
            partial_upper: upper,
        });
    }
    let g = GrowthSeries::from_partials_with_se(
        sizes.clone(),
        rows.iter().map(|r| r.partial_upper).collect(),
        series_se,
    );
    Ok(TruncatedReport {
        rows,
        verdict: growth_verdict(&g),
    })
}

fn truncated_moments(
    model: &TailModel,
    cfg: &ExperimentConfig,
    r: usize,
    sizes: &[u64],
    thresholds: &[f64],
) -> Vec<f64> {
    let seq = IidReal { model };
    sizes
        .iter()
        .zip(thresholds)
        .map(|(&n, &thr)| {
            // Same stream for every n: U_{n,n} uses the first n draws of this replication.
            let mut rng = replication_rng(cfg.master_seed, r as u64, Stream::Main);
            let mut acc = NeumaierSum::default();
            for i in 1..=n {
                let x = seq.draw(i, &mut rng);
                if x.abs() <= thr {
                    acc.add(x);
                }
            }
            acc.value().abs().powf(cfg.q)
        })
        .collect()
}
