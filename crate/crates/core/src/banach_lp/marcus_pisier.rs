use rand::distributions::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc_engine::{replication_rng, with_workers, Stream};
use crate::tail_models::{TailModel, TailSignature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarcusPisierRow {
    pub u: f64,
    /// Empirical `P(sup_k k^{1/r} X*_k > u)`.
    pub lhs: f64,
    /// Binomial standard error of `lhs`.
    pub se: f64,
    /// `(2e / u^r) sup_t t^r sum_k P(|X_k| > t)`
    pub rhs: f64,
    /// `lhs <= rhs + 4 se`
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarcusPisierReport {
    pub model: String,
    pub n: usize,
    pub r: f64,
    pub replications: usize,
    /// `sup_t t^r P(|X| > t)`
    pub sup_tail: f64,
    pub rows: Vec<MarcusPisierRow>,
}

impl MarcusPisierReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    f(0.5 * (a + b))
}

/// `sup_t t^r P(|X| > t)`, infinite when the tail is heavier than `t^-r`.
///
/// Scans a geometric grid plus the left limits at every breakpoint, then refines the best
/// grid cell by golden-section search in `ln t`.
pub fn sup_tail_moment(model: &TailModel, r: f64) -> f64 {
    let upper = match model.signature() {
        Some(TailSignature::Regular { a, b, d, .. }) => {
            if a < r || (a == r && (b < 0.0 || (b == 0.0 && d < 0.0))) {
                return f64::INFINITY;
            }
            1e15
        }
        Some(TailSignature::Bounded { upper }) => upper,
        None => 1e15,
    };
    if upper <= 0.0 {
        return 0.0;
    }
    let h = |lt: f64| {
        let t = lt.exp();
        t.powf(r) * model.survival(t)
    };
    let (lo, hi) = ((1e-9f64).min(upper).ln(), upper.ln());
    let points = 4000;
    let step = (hi - lo) / points as f64;
    let mut best = 0.0f64;
    let mut best_i = 0usize;
    for i in 0..=points {
        let v = h(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    best = best.max(golden_max(h, a, b));
    // S is right-continuous, so the supremum may only be approached from the left.
    for bp in model.breakpoints().into_iter().chain([upper]) {
        if bp.is_finite() {
            best = best.max(bp.powf(r) * model.survival(bp * (1.0 - 1e-12)));
        }
    }
    best
}

/// `sup_k k^{1/r} X*_k` for one sample.
fn weighted_order_max(mut xs: Vec<f64>, r: f64) -> f64 {
    xs.sort_by(|a, b| b.total_cmp(a));
    xs.iter()
        .enumerate()
        .map(|(k, x)| ((k + 1) as f64).powf(1.0 / r) * x)
        .fold(0.0, f64::max)
}

/// Empirical check of the Marcus-Pisier maximal inequality for `n` i.i.d. copies of
/// `|X|` against its analytic right-hand side on `u_grid`.
pub fn marcus_pisier_check(
    model: &TailModel,
    n: usize,
    r: f64,
    u_grid: &[f64],
    replications: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<MarcusPisierReport> {
    if !(r >= 1.0) {
        return Err(Error::PreconditionViolated(format!("need r >= 1, got {r}")));
    }
    if n == 0 || replications < 2 {
        return Err(Error::InvalidConfig(
            "need n >= 1 and at least 2 replications".into(),
        ));
    }
    let stats: Vec<f64> = with_workers(workers, || {
        (0..replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replication_rng(seed, rep as u64, Stream::Main);
                let xs = (0..n)
                    .map(|_| {
                        let u: f64 = rng.sample(Open01);
                        model.generalized_inverse(u, false)
                    })
                    .collect();
                weighted_order_max(xs, r)
            })
            .collect()
    })?;
    let sup_tail = sup_tail_moment(model, r);
    let reps = replications as f64;
    let rows = u_grid
        .iter()
        .map(|&u| {
            let lhs = stats.iter().filter(|&&m| m > u).count() as f64 / reps;
            let se = (lhs * (1.0 - lhs) / reps).sqrt();
            let rhs = if sup_tail == 0.0 {
                0.0
            } else {
                2.0 * std::f64::consts::E / u.powf(r) * n as f64 * sup_tail
            };
            MarcusPisierRow {
                u,
                lhs,
                se,
                rhs,
                holds: lhs <= rhs + 4.0 * se,
            }
        })
        .collect();
    Ok(MarcusPisierReport {
        model: model.name.clone(),
        n,
        r,
        replications,
        sup_tail,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_sup_is_attained_at_the_knee() {
        let m = TailModel::pareto(1.5);
        assert!((sup_tail_moment(&m, 1.2) - 1.0).abs() < 1e-9);
        assert!(sup_tail_moment(&m, 2.0).is_infinite());
    }

    #[test]
    fn degenerate_sup_is_the_level() {
        let m = TailModel::degenerate(1.0);
        assert!((sup_tail_moment(&m, 1.0) - 1.0).abs() < 1e-9);
        assert_eq!(sup_tail_moment(&TailModel::zero(), 1.0), 0.0);
    }

    #[test]
    fn order_statistic_weighting() {
        // sorted 3, 2, 1 with r = 1: max(3, 4, 3)
        assert_eq!(weighted_order_max(vec![1.0, 3.0, 2.0], 1.0), 4.0);
    }
}
