//! Cross-replication summaries of a [`CheckpointTable`].

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SequenceSpec};
use super::engine::{harmonic_weight, CheckpointTable};
use super::growth::{growth_verdict, GrowthSeries, GROWTH_WINDOW};
use crate::criteria::{Verdict, VerdictKind};
use crate::tail_models::{TailModel, TailSignature};

/// Ratio of the largest to the median final-window increment of `W` above which a
/// pathwise Converges verdict is not trusted.
pub const DISPERSION_LIMIT: f64 = 10.0;

/// Largest gap between the local and the asymptotic tail exponent at the window edge for
/// which finite-window verdicts are kept.
pub const EXPONENT_GAP_LIMIT: f64 = 0.05;

/// Asymptotic efficiency factor of the sample median, `sqrt(pi / 2)`.
const MEDIAN_SE_FACTOR: f64 = 1.253_314_137_315_500_3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub median: f64,
    pub iqr: f64,
    /// Standard error of the mean.
    pub se: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean: f64::NAN,
                median: f64::NAN,
                iqr: f64::NAN,
                se: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean,
            median: quantile_sorted(&sorted, 0.5),
            iqr: (quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25)).max(0.0),
            se: (var / n).sqrt(),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEstimate {
    pub n: u64,
    /// Statistics of `r_n^q`.
    pub ratio_q: Moments,
    /// Statistics of `W_n`.
    pub w: Moments,
    /// Block proxies of `sum_{m <= n} E r_m^q / m` using right (lower) and left (upper)
    /// block edges.
    pub block_lower: f64,
    pub block_upper: f64,
}

/// Estimates `E r_n^q` at each checkpoint and the block proxies of the expectation
/// series. Censored replications are excluded.
pub fn estimate_series_expectation(table: &CheckpointTable, _cfg: &ExperimentConfig) -> Vec<SeriesEstimate> {
    let q = table.q;
    let mut out = Vec::with_capacity(table.checkpoints.len());
    let (mut lower, mut upper) = (0.0, 0.0);
    let mut prev: Option<(u64, f64)> = None;
    for &n in &table.checkpoints {
        let rq: Vec<f64> = table.column_at(n, |r| r.ratio.powf(q));
        let w: Vec<f64> = table.column_at(n, |r| r.w_partial);
        let ratio_q = Moments::of(&rq);
        let (a, left) = prev.unwrap_or((0, ratio_q.mean));
        let weight = harmonic_weight(a, n);
        lower += weight * ratio_q.mean.min(left);
        upper += weight * ratio_q.mean.max(left);
        prev = Some((n, ratio_q.mean));
        out.push(SeriesEstimate {
            n,
            ratio_q,
            w: Moments::of(&w),
            block_lower: lower,
            block_upper: upper,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub p: f64,
    pub q: f64,
    pub n_max: u64,
    pub replications: usize,
    pub master_seed: u64,
    pub estimates: Vec<SeriesEstimate>,
    /// Trend of the median pathwise increments of `W`.
    pub w_verdict: Verdict,
    /// Trend of the block proxies of the expectation series.
    pub expectation_verdict: Verdict,
    /// `(replication, n)` for every replication that overflowed.
    pub censored: Vec<(usize, u64)>,
    /// Largest over median final-window increment of `W` across replications.
    pub dispersion_ratio: f64,
    /// See [`window_exponent_gap`]; 0 for exact power or bounded tails.
    pub exponent_gap: f64,
    /// Median of `r_{n_max}` over complete replications.
    pub final_ratio_median: f64,
    pub notes: Vec<String>,
}

/// Pathwise trend of `W`: per doubling, the median across replications of the increment
/// of `W`, accumulated from the median of `W` at the first checkpoint.
pub fn pathwise_w_series(table: &CheckpointTable) -> GrowthSeries {
    let idx: Vec<usize> = (0..table.checkpoints.len())
        .filter(|&i| table.checkpoints[i].is_power_of_two())
        .collect();
    let paths: Vec<_> = table.complete_paths().collect();
    let mut n = Vec::with_capacity(idx.len());
    let mut partial = Vec::with_capacity(idx.len());
    let mut se = Vec::with_capacity(idx.len());
    let mut acc = 0.0;
    for (j, &i) in idx.iter().enumerate() {
        let inc: Vec<f64> = paths
            .iter()
            .map(|p| p.rows[i].w_partial - if j == 0 { 0.0 } else { p.rows[idx[j - 1]].w_partial })
            .collect();
        let m = Moments::of(&inc);
        acc += m.median;
        n.push(table.checkpoints[i]);
        partial.push(acc);
        se.push(MEDIAN_SE_FACTOR * m.se);
    }
    GrowthSeries::from_partials_with_se(n, partial, se)
}

/// `max_r / median_r` of `W_r(N) - W_r(N / 2^w)` over the growth window.
pub fn dispersion_ratio(table: &CheckpointTable) -> f64 {
    let dy: Vec<usize> = (0..table.checkpoints.len())
        .filter(|&i| table.checkpoints[i].is_power_of_two())
        .collect();
    if dy.len() < 2 {
        return 1.0;
    }
    let hi = dy[dy.len() - 1];
    let lo = dy[dy.len().saturating_sub(GROWTH_WINDOW + 1)];
    let incs: Vec<f64> = table
        .complete_paths()
        .map(|p| p.rows[hi].w_partial - p.rows[lo].w_partial)
        .collect();
    let max = incs.iter().copied().fold(0.0, f64::max);
    let med = median(&incs);
    if max == 0.0 {
        1.0
    } else if med > 0.0 {
        max / med
    } else {
        f64::INFINITY
    }
}

/// `|a_loc(u_N) - a|` where `a_loc(t) = -d ln P(|X| > t) / d ln t` and `a` is its limit.
///
/// Log factors in the tail make the sampled scale look lighter than the asymptotic one;
/// a large gap means the window has not reached the regime that decides convergence.
pub fn window_exponent_gap(model: &TailModel, n_max: u64) -> f64 {
    let Some(TailSignature::Regular { b, d, .. }) = model.signature() else {
        return 0.0;
    };
    if b == 0.0 && d == 0.0 {
        return 0.0;
    }
    let Ok(q) = model.quantile_un(n_max) else {
        return f64::INFINITY;
    };
    let lt = q.u_n.ln();
    if !(lt > 1.0) {
        return f64::INFINITY;
    }
    (b / lt + d / (lt * lt.ln())).abs()
}

fn combine(lower: Verdict, upper: Verdict) -> Verdict {
    if lower.kind == upper.kind {
        upper
    } else {
        let mut v = upper;
        v.kind = VerdictKind::Inconclusive;
        v.remainder_bound = None;
        v
    }
}

/// Summary statistics and finite-window verdicts for one run.
pub fn summarize(table: &CheckpointTable, cfg: &ExperimentConfig) -> SimulationSummary {
    let estimates = estimate_series_expectation(table, cfg);
    let mut notes = Vec::new();
    let censored = table.censored();
    if !censored.is_empty() {
        notes.push(format!(
            "{} of {} replications overflowed and are excluded",
            censored.len(),
            table.paths.len()
        ));
    }

    let mut w_verdict = growth_verdict(&pathwise_w_series(table));
    let dispersion = dispersion_ratio(table);
    if w_verdict.kind == VerdictKind::Converges && dispersion > DISPERSION_LIMIT {
        w_verdict.kind = VerdictKind::Inconclusive;
        w_verdict.remainder_bound = None;
        notes.push(format!(
            "pathwise W looks convergent in the median but the largest final-window \
             increment is {dispersion:.3e} times the median; downgraded to Inconclusive"
        ));
    }

    let gap = match &cfg.sequence {
        SequenceSpec::Iid { model } => model
            .build()
            .map(|m| window_exponent_gap(&m, table.n_max))
            .unwrap_or(f64::INFINITY),
        _ => 0.0,
    };
    let dyadic: Vec<&SeriesEstimate> = estimates.iter().filter(|e| e.n.is_power_of_two()).collect();
    let reps = table.complete_paths().count() as f64;
    let mut prev = 0;
    let se: Vec<f64> = dyadic
        .iter()
        .map(|e| {
            let w = harmonic_weight(prev, e.n);
            prev = e.n;
            w * e.ratio_q.se
        })
        .collect();
    let ns: Vec<u64> = dyadic.iter().map(|e| e.n).collect();
    let lower = GrowthSeries::from_partials_with_se(
        ns.clone(),
        dyadic.iter().map(|e| e.block_lower).collect(),
        se.clone(),
    );
    let upper = GrowthSeries::from_partials_with_se(ns, dyadic.iter().map(|e| e.block_upper).collect(), se);
    let mut expectation_verdict = combine(growth_verdict(&lower), growth_verdict(&upper));
    if gap > EXPONENT_GAP_LIMIT {
        for v in [&mut w_verdict, &mut expectation_verdict] {
            if v.kind != VerdictKind::Inconclusive {
                v.kind = VerdictKind::Inconclusive;
                v.remainder_bound = None;
            }
        }
        notes.push(format!(
            "local tail exponent at u_N differs from its limit by {gap:.3}; the window is \
             pre-asymptotic and both verdicts are Inconclusive"
        ));
    }
    if reps < 2.0 {
        notes.push("fewer than two complete replications".into());
    }

    let final_ratio_median = table
        .checkpoints
        .last()
        .map(|&n| median(&table.column_at(n, |r| r.ratio)))
        .unwrap_or(f64::NAN);

    SimulationSummary {
        p: table.p,
        q: table.q,
        n_max: table.n_max,
        replications: table.paths.len(),
        master_seed: cfg.master_seed,
        estimates,
        w_verdict,
        expectation_verdict,
        censored,
        dispersion_ratio: dispersion,
        exponent_gap: gap,
        final_ratio_median,
        notes,
    }
}
