//! Convergence verdicts for the moment, integral and truncated-series conditions, and the
//! clause-by-clause membership report built from them.
//!
//! Each verdict carries two pieces of evidence: exponents fitted on the last decade of the
//! evaluation window, and the leading-order exponents read off the exact tail formula.
//! The final kind comes from the latter when the model provides it; the fitted exponents
//! are kept for inspection. All verdicts describe a finite window and are not proofs.

mod moments;
mod report;
mod series;
mod verdict;

pub use moments::{integral_pq, llogl_moment, p_moment};
pub use report::{
    classify_slln, mean_zero_status, series_expectation_criterion, ClauseTable, CriterionReport, FactCheck,
    Membership,
};
pub use series::{checkpoint_grid, truncated_series, SeriesCheckpoint, TruncatedSeries};
pub use verdict::{
    decide, edge_evidence, kind_of_exponents, last_decade, Asymptotics, ExponentEvidence, Verdict,
    VerdictKind, VANISHING_BETA,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaOptions {
    /// Upper end of the integration window.
    pub t_cap: f64,
    /// Grid density on the last decade.
    pub per_decade: usize,
    /// Half-width of the band around 1 in which `lambda` is fitted.
    pub delta: f64,
    /// Number of terms of the truncated series.
    pub n_max: u64,
    /// Nodes of the cumulative tail table used by the truncated series.
    pub table_points: usize,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        Self {
            t_cap: 1e12,
            per_decade: 25,
            delta: 0.05,
            n_max: 100_000,
            table_points: 400,
        }
    }
}
