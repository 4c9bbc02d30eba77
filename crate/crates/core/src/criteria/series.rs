use serde::{Deserialize, Serialize};

use super::verdict::{decide, edge_evidence, Asymptotics, Verdict};
use super::CriteriaOptions;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::tail_models::{TailModel, TailSignature};

const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheckpoint {
    pub n: u64,
    pub u_n: f64,
    pub term: f64,
    /// `sum_{m <= n} E(|X|^p 1(min{u_m^p, m} < |X|^p <= m)) / m`
    pub partial: f64,
    pub integral_form_term: f64,
    /// Same sum with `int_{min{u_m^p, m}}^m P(|X|^p > t) dt` in place of the expectation.
    pub integral_form_partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub p: f64,
    pub n_max: u64,
    pub checkpoints: Vec<SeriesCheckpoint>,
    pub verdict: Verdict,
    /// Growth verdict of the integral-form diagnostic.
    pub integral_form_verdict: Verdict,
}

/// Integer checkpoints on a geometric grid with `per_decade` points per decade, ending at `n_max`.
pub fn checkpoint_grid(n_max: u64, per_decade: usize) -> Vec<u64> {
    let decades = (n_max as f64).log10();
    let steps = (decades * per_decade as f64).ceil() as usize;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| 10f64.powf(i as f64 / per_decade as f64).round() as u64)
        .filter(|&n| n >= 1 && n <= n_max)
        .collect();
    out.push(n_max);
    out.dedup();
    out
}

/// Leading-order behaviour of the series terms from the tail signature.
///
/// With `Y = |X|^p` and `P(Y > y) ~ c y^-alpha L(y)`, the window `(u_n^p, n]` is eventually
/// empty when `alpha < 1` or the slowly varying part increases; for `alpha > 1` the terms
/// are `O(n^{1/alpha - 2})`; at `alpha = 1` they behave like `c L(n) ln(1 / (c L(n))) / n`.
fn series_asymptotics(sig: TailSignature, p: f64) -> Asymptotics {
    match sig {
        // Terms are at most upper^p / n^2.
        TailSignature::Bounded { .. } => Asymptotics::Regular {
            exponents: [2.0, 0.0, 0.0],
        },
        TailSignature::Regular { c, .. } if c == 0.0 => Asymptotics::EmptyWindow,
        TailSignature::Regular { c, a, b, d } => {
            let alpha = a / p;
            if (alpha - 1.0).abs() > EXPONENT_TOL {
                if alpha < 1.0 {
                    Asymptotics::EmptyWindow
                } else {
                    Asymptotics::Regular {
                        exponents: [2.0 - 1.0 / alpha, 0.0, 0.0],
                    }
                }
            } else if b > 0.0 {
                Asymptotics::Regular {
                    exponents: [1.0, b, d - 1.0],
                }
            } else if b < 0.0 {
                Asymptotics::EmptyWindow
            } else if d > 0.0 {
                Asymptotics::Regular {
                    exponents: [1.0, 0.0, d - 1.0],
                }
            } else if d < 0.0 || c >= 1.0 {
                Asymptotics::EmptyWindow
            } else {
                Asymptotics::Regular {
                    exponents: [1.0, 0.0, 0.0],
                }
            }
        }
    }
}

/// Partial sums of `sum_n E(|X|^p 1(min{u_n^p, n} < |X|^p <= n)) / n` up to `n_max`.
pub fn truncated_series(
    model: &TailModel,
    p: f64,
    n_max: u64,
    opts: &CriteriaOptions,
) -> Result<TruncatedSeries> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "truncated series needs 0 < p < 1, got {p}"
        )));
    }
    if n_max < 1000 {
        return Err(Error::Domain(format!(
            "truncated series needs n_max >= 1000, got {n_max}"
        )));
    }
    let table = model.cumulative_tail_table(p, n_max as f64, opts.table_points)?;
    let grid = checkpoint_grid(n_max, opts.per_decade);
    let mut next = 0;
    let mut sum = NeumaierSum::default();
    let mut sum_int = NeumaierSum::default();
    let mut checkpoints = Vec::with_capacity(grid.len());
    for n in 1..=n_max {
        let q = model.quantile_un(n)?;
        let nf = n as f64;
        let lo = q.u_n.powf(p).min(nf);
        let (term, term_int) = if lo < nf {
            (table.truncated_moment(lo, nf)? / nf, table.integral(lo, nf)? / nf)
        } else {
            (0.0, 0.0)
        };
        sum.add(term);
        sum_int.add(term_int);
        if grid.get(next) == Some(&n) {
            checkpoints.push(SeriesCheckpoint {
                n,
                u_n: q.u_n,
                term,
                partial: sum.value(),
                integral_form_term: term_int,
                integral_form_partial: sum_int.value(),
            });
            next += 1;
        }
    }
    let asym = model.signature().map(|s| series_asymptotics(s, p));
    let verdict = series_verdict(&checkpoints, n_max, asym.clone(), opts, |c| (c.term, c.partial));
    let integral_form_verdict = series_verdict(&checkpoints, n_max, asym, opts, |c| {
        (c.integral_form_term, c.integral_form_partial)
    });
    Ok(TruncatedSeries {
        p,
        n_max,
        checkpoints,
        verdict,
        integral_form_verdict,
    })
}

fn series_verdict(
    checkpoints: &[SeriesCheckpoint],
    n_max: u64,
    asym: Option<Asymptotics>,
    opts: &CriteriaOptions,
    pick: impl Fn(&SeriesCheckpoint) -> (f64, f64),
) -> Verdict {
    let last: Vec<&SeriesCheckpoint> = checkpoints.iter().filter(|c| c.n * 10 >= n_max).collect();
    let xs: Vec<f64> = last.iter().map(|c| c.n as f64).collect();
    let terms: Vec<f64> = last.iter().map(|c| pick(c).0).collect();
    let partials: Vec<(f64, f64)> = last.iter().map(|c| (c.n as f64, pick(c).1)).collect();
    let evidence = edge_evidence(&xs, &terms, opts);
    let estimate = partials.last().map(|v| v.1).unwrap_or(0.0);
    decide(evidence, asym, estimate, partials, *terms.last().unwrap_or(&0.0))
}
