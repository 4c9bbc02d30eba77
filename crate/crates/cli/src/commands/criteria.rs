use std::path::Path;

use pq_slln::criteria::{
    classify_slln, series_expectation_criterion, ClauseTable, CriterionReport, Membership,
};

use crate::config::CriteriaConfig;
use crate::error::{CliError, Result};
use crate::output::{to_json, Staging};

pub const REPORT_FILE: &str = "criteria.json";

/// Exit status for a finished evaluation: 0 for a definite membership, 3 otherwise.
pub fn membership_exit_code(m: Membership) -> i32 {
    match m {
        Membership::Member | Membership::NonMember => 0,
        Membership::Inconclusive => 3,
    }
}

pub fn evaluate(cfg: &CriteriaConfig, path: &Path) -> Result<CriterionReport> {
    let model = cfg.model.build().map_err(|e| CliError::config(path, e))?;
    let opts = cfg.options.unwrap_or_default();
    Ok(match cfg.table.unwrap_or(ClauseTable::AlmostSure) {
        ClauseTable::AlmostSure => classify_slln(&model, cfg.p, cfg.q, &opts)?,
        ClauseTable::SeriesExpectation => series_expectation_criterion(&model, cfg.p, cfg.q, &opts)?,
    })
}

/// Evaluates the configured criterion; writes the report to `out/criteria.json`, or to
/// stdout when `out` is `None`. Returns the report and the exit status.
pub fn cmd_criteria(config: &Path, out: Option<&Path>) -> Result<(CriterionReport, i32)> {
    let cfg = CriteriaConfig::load(config)?;
    let report = evaluate(&cfg, config)?;
    let bytes = to_json(&report);
    match out {
        Some(dir) => {
            let mut stage = Staging::new(dir)?;
            stage.write(REPORT_FILE, &bytes)?;
            stage.commit()?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    let code = membership_exit_code(report.membership);
    Ok((report, code))
}
