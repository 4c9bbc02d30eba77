//! Trend classification of partial sums observed at dyadic indices.

use serde::{Deserialize, Serialize};

use crate::criteria::{ExponentEvidence, Verdict, VerdictKind, VANISHING_BETA};
use crate::numeric::linear_fit;

/// Number of doublings inspected at the end of the series.
pub const GROWTH_WINDOW: usize = 10;
const DELTA: f64 = 0.05;
const SIGNIFICANCE: f64 = 3.0;

/// Partial sums `V(n_k)` at dyadic `n_k`, with standard errors of the increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub n: Vec<u64>,
    pub partial: Vec<f64>,
    /// `increment_se[k]` is the standard error of `partial[k] - partial[k - 1]`
    /// (entry 0 refers to `partial[0]` itself).
    pub increment_se: Vec<f64>,
}

impl GrowthSeries {
    /// Exact partial sums.
    pub fn from_partials(n: Vec<u64>, partial: Vec<f64>) -> Self {
        let se = vec![0.0; n.len()];
        Self::from_partials_with_se(n, partial, se)
    }

    pub fn from_partials_with_se(n: Vec<u64>, partial: Vec<f64>, increment_se: Vec<f64>) -> Self {
        assert_eq!(n.len(), partial.len());
        assert_eq!(n.len(), increment_se.len());
        Self {
            n,
            partial,
            increment_se,
        }
    }

    /// Keeps only the entries at powers of two.
    pub fn dyadic(&self) -> Self {
        let keep: Vec<usize> = (0..self.n.len())
            .filter(|&i| self.n[i].is_power_of_two())
            .collect();
        Self {
            n: keep.iter().map(|&i| self.n[i]).collect(),
            partial: keep.iter().map(|&i| self.partial[i]).collect(),
            increment_se: keep.iter().map(|&i| self.increment_se[i]).collect(),
        }
    }
}

fn inconclusive(window: (f64, f64), partial_values: Vec<(f64, f64)>) -> Verdict {
    Verdict {
        kind: VerdictKind::Inconclusive,
        estimate_on_window: partial_values.last().map(|v| v.1).unwrap_or(0.0),
        evidence: ExponentEvidence {
            beta: 1.0,
            lambda: None,
            window,
            numeric_kind: VerdictKind::Inconclusive,
        },
        asymptotics: None,
        remainder_bound: None,
        partial_values,
        partial_slope: 0.0,
    }
}

/// Slope and its standard error for `y` against `x`, adding the propagated error of
/// independent noise `sy` on the ordinates to the residual error.
fn slope_with_noise(x: &[f64], y: &[f64], sy: &[f64]) -> Option<(f64, f64)> {
    let fit = linear_fit(x, y)?;
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let noise: f64 = x
        .iter()
        .zip(sy)
        .map(|(v, s)| ((v - mx) * s).powi(2))
        .sum::<f64>()
        .sqrt()
        / sxx;
    Some((fit.slope, fit.slope_se.hypot(noise)))
}

fn rss(x: &[f64], y: &[f64]) -> f64 {
    linear_fit(x, y)
        .map(|f| {
            x.iter()
                .zip(y)
                .map(|(a, b)| (b - f.intercept - f.slope * a).powi(2))
                .sum()
        })
        .unwrap_or(f64::INFINITY)
}

/// Classifies partial sums over the last [`GROWTH_WINDOW`] doublings.
///
/// Increments per doubling `D_k` behave like `2^{k(1 - beta)}` when the terms decay like
/// `n^-beta` and like `k^-lambda` when they decay like `1 / (n ln^lambda n)`. The shape
/// with the smaller residual decides convergence: its exponent must exceed 1 by more than
/// both 0.05 and three standard errors. Diverges when the increments stay significantly
/// positive with `lambda < 0.95`, `beta < 1.05` and the partial sums grow in `ln n`
/// beyond three standard errors; Inconclusive otherwise.
pub fn growth_verdict(series: &GrowthSeries) -> Verdict {
    let s = series.dyadic();
    let len = s.n.len();
    let partial_values: Vec<(f64, f64)> =
        s.n.iter()
            .zip(&s.partial)
            .map(|(&n, &v)| (n as f64, v))
            .skip(len.saturating_sub(GROWTH_WINDOW + 1))
            .collect();
    if len < 5 {
        let window = (
            partial_values.first().map(|v| v.0).unwrap_or(0.0),
            partial_values.last().map(|v| v.0).unwrap_or(0.0),
        );
        return inconclusive(window, partial_values);
    }
    let start = len.saturating_sub(GROWTH_WINDOW + 1);
    let idx: Vec<usize> = ((start + 1)..len).collect();
    let window = (s.n[start] as f64, s.n[len - 1] as f64);
    let last_value = s.partial[len - 1];
    let incs: Vec<f64> = idx.iter().map(|&i| s.partial[i] - s.partial[i - 1]).collect();
    let ses: Vec<f64> = idx.iter().map(|&i| s.increment_se[i]).collect();
    let ks: Vec<f64> = idx.iter().map(|&i| (s.n[i] as f64).ln()).collect();

    let scale = last_value.abs().max(1.0);
    let vanishing = incs.iter().all(|d| d.abs() <= 1e-12 * scale);
    let (lx, ly): (Vec<f64>, Vec<f64>) = s.n[start..]
        .iter()
        .zip(&s.partial[start..])
        .map(|(&n, &v)| ((n as f64).ln(), v))
        .unzip();
    let partial_slope = linear_fit(&lx, &ly).map(|f| f.slope).unwrap_or(0.0);
    let mut verdict = Verdict {
        kind: VerdictKind::Inconclusive,
        estimate_on_window: last_value,
        evidence: ExponentEvidence {
            beta: VANISHING_BETA,
            lambda: None,
            window,
            numeric_kind: VerdictKind::Inconclusive,
        },
        asymptotics: None,
        remainder_bound: None,
        partial_values: partial_values.clone(),
        partial_slope,
    };
    if vanishing {
        verdict.kind = VerdictKind::Converges;
        verdict.evidence.numeric_kind = VerdictKind::Converges;
        verdict.remainder_bound = Some(0.0);
        return verdict;
    }

    // Decay of |D_k| in ln n; zero increments carry no slope information.
    let pts: Vec<(f64, f64, f64, f64)> = ks
        .iter()
        .zip(&incs)
        .zip(&ses)
        .filter(|((_, d), _)| d.abs() > 0.0)
        .map(|((&k, &d), &se)| (k, d.abs().ln(), se / d.abs(), (k / std::f64::consts::LN_2).ln()))
        .collect();
    if pts.len() < 4 {
        return inconclusive(window, partial_values);
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let sy: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let Some((slope, slope_se)) = slope_with_noise(&x, &y, &sy) else {
        return inconclusive(window, partial_values);
    };
    let beta = 1.0 - slope;
    let log_k: Vec<f64> = pts.iter().map(|p| p.3).collect();
    let Some((log_slope, log_slope_se)) = slope_with_noise(&log_k, &y, &sy) else {
        return inconclusive(window, partial_values);
    };
    // |D_k| ~ k^-lambda corresponds to terms 1/(n ln^lambda n); the sum over doublings
    // converges iff lambda > 1. Whichever of the two shapes fits the window better decides.
    let lambda = -log_slope;
    let power_regime = rss(&x, &y) <= rss(&log_k, &y);
    verdict.evidence.beta = beta;
    verdict.evidence.lambda = ((beta - 1.0).abs() < DELTA).then_some(lambda);

    let last_inc = incs.last().copied().unwrap_or(0.0).abs();
    let power_converges = beta > 1.0 + DELTA.max(SIGNIFICANCE * slope_se);
    let log_converges = lambda > 1.0 + DELTA.max(SIGNIFICANCE * log_slope_se);
    if power_regime && power_converges {
        let r = 2f64.powf(1.0 - beta);
        verdict.kind = VerdictKind::Converges;
        verdict.remainder_bound = Some(last_inc * r / (1.0 - r));
    } else if !power_regime && log_converges {
        let k = log_k.last().copied().unwrap_or(0.0).exp();
        verdict.kind = VerdictKind::Converges;
        verdict.remainder_bound = Some(last_inc * k / (lambda - 1.0));
    } else {
        let significant = incs
            .iter()
            .zip(&ses)
            .all(|(&d, &se)| d > 0.0 && d > SIGNIFICANCE * se);
        let total_se: f64 = ses.iter().map(|s| s * s).sum::<f64>().sqrt();
        let grows =
            partial_slope > 0.0 && partial_slope * (lx[lx.len() - 1] - lx[0]) > SIGNIFICANCE * total_se;
        if significant && grows && lambda < 1.0 - DELTA && beta < 1.0 + DELTA {
            verdict.kind = VerdictKind::Diverges;
        }
    }
    verdict.evidence.numeric_kind = verdict.kind;
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc_engine::config::dyadic_grid;

    fn exact(f: impl Fn(u64) -> f64) -> GrowthSeries {
        let n = dyadic_grid(1 << 20);
        let v = n.iter().map(|&k| f(k)).collect();
        GrowthSeries::from_partials(n, v)
    }

    fn harmonic(n: u64) -> f64 {
        (1..=n).map(|m| 1.0 / m as f64).sum()
    }

    #[test]
    fn constant_partials_converge() {
        let v = growth_verdict(&exact(|_| 3.5));
        assert_eq!(v.kind, VerdictKind::Converges);
        assert_eq!(v.remainder_bound, Some(0.0));
    }

    #[test]
    fn harmonic_numbers_diverge() {
        let v = growth_verdict(&exact(harmonic));
        assert_eq!(v.kind, VerdictKind::Diverges);
        assert!((v.partial_slope - 1.0).abs() < 1e-3);
    }

    #[test]
    fn alternating_bounded_sequence_converges() {
        let v = growth_verdict(&exact(|n| {
            2.0 + (-1f64).powi(n.trailing_zeros() as i32) / n as f64
        }));
        assert_eq!(v.kind, VerdictKind::Converges);
    }

    #[test]
    fn power_decay_converges_and_bounds_the_tail() {
        // partial sums of n^-1.5
        let v = growth_verdict(&exact(|n| 2.612 - 2.0 / (n as f64).sqrt()));
        assert_eq!(v.kind, VerdictKind::Converges);
        assert!((v.evidence.beta - 1.5).abs() < 1e-6);
        // true remainder 2 / sqrt(2^20)
        let rem = v.remainder_bound.unwrap();
        assert!((rem - 2.0 / 1024.0).abs() < 1e-9);
    }

    #[test]
    fn slow_log_growth_is_not_convergent() {
        let v = growth_verdict(&exact(|n| (1.0 + (n as f64).ln()).ln()));
        assert_ne!(v.kind, VerdictKind::Converges);
    }

    #[test]
    fn squared_log_decay_converges() {
        // increments of -1/ln n, terms ~ 1/(n ln^2 n)
        let v = growth_verdict(&exact(|n| 1.0 - 1.0 / (1.0 + (n as f64).ln())));
        assert_eq!(v.kind, VerdictKind::Converges);
        assert!(v.remainder_bound.unwrap().is_finite());
    }

    #[test]
    fn noisy_flat_increments_are_not_divergent() {
        let n = dyadic_grid(1 << 20);
        let partial: Vec<f64> = (0..n.len()).map(|k| 1e-3 * k as f64).collect();
        let se = vec![1e-2; n.len()];
        let v = growth_verdict(&GrowthSeries::from_partials_with_se(n, partial, se));
        assert_eq!(v.kind, VerdictKind::Inconclusive);
    }
}
