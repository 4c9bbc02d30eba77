use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pq_slln::criteria::{
    classify_slln, series_expectation_criterion, CriteriaOptions, Membership, VerdictKind,
};
use pq_slln::mc_engine::{ExperimentConfig, Mode, SequenceSpec, SimulationSummary};
use pq_slln::tail_models::{BuiltinSpec, ModelRef};
use serde::{Deserialize, Serialize};

use super::simulate::{simulate_config, SUMMARY_FILE};
use crate::config::{parse_json, read_text, SimulateConfig, SCHEMA_VERSION};
use crate::error::{CliError, Result};
use crate::manifest::{RunManifest, MANIFEST_FILE};
use crate::output::{to_json, Staging};
use crate::Format;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub manifest: String,
    pub model: String,
    pub p: f64,
    pub q: f64,
    pub clause: String,
    /// Membership from the almost-sure clause table; `None` for non-i.i.d. sequences.
    pub analytic_as: Option<Membership>,
    pub empirical_w: VerdictKind,
    /// Membership from the series-expectation clause table.
    pub analytic_series: Option<Membership>,
    pub empirical_expectation: VerdictKind,
    /// Converges against NonMember or Diverges against Member, in either pair.
    pub contradiction: bool,
}

pub const REPORT_COLUMNS: &str =
    "manifest,model,p,q,clause,analytic_as,empirical_w,analytic_series,empirical_expectation,contradiction";

fn hard(analytic: Option<Membership>, empirical: VerdictKind) -> bool {
    matches!(
        (analytic, empirical),
        (Some(Membership::Member), VerdictKind::Diverges)
            | (Some(Membership::NonMember), VerdictKind::Converges)
    )
}

fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Compares the empirical verdicts recorded by one `simulate` run with the analytic ones.
pub fn report_row(manifest_path: &Path, opts: &CriteriaOptions) -> Result<ReportRow> {
    let manifest = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let summary_path = manifest
        .output(dir, SUMMARY_FILE)
        .ok_or_else(|| CliError::config(manifest_path, "manifest lists no summary"))?;
    let summary: SimulationSummary = parse_json(&summary_path, &read_text(&summary_path)?)?;
    let exp = &manifest.config.experiment;
    let (model_name, clause, analytic_as, analytic_series) = match &exp.sequence {
        SequenceSpec::Iid { model } => {
            let model = model.build().map_err(|e| CliError::config(manifest_path, e))?;
            let a = classify_slln(&model, exp.p, exp.q, opts)?;
            let s = series_expectation_criterion(&model, exp.p, exp.q, opts)?;
            (
                model.name.clone(),
                label(&a.clause),
                Some(a.membership),
                Some(s.membership),
            )
        }
        SequenceSpec::LpCounterexample => ("lp-counterexample".into(), String::new(), None, None),
        SequenceSpec::LpProbe { rule } => (format!("lp-probe-{}", label(rule)), String::new(), None, None),
    };
    let w = summary.w_verdict.kind;
    let e = summary.expectation_verdict.kind;
    Ok(ReportRow {
        manifest: manifest_path.display().to_string(),
        model: model_name,
        p: exp.p,
        q: exp.q,
        clause,
        analytic_as,
        empirical_w: w,
        analytic_series,
        empirical_expectation: e,
        contradiction: hard(analytic_as, w) || hard(analytic_series, e),
    })
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from(REPORT_COLUMNS);
    s.push('\n');
    let opt = |m: &Option<Membership>| m.as_ref().map(label).unwrap_or_else(|| "n/a".into());
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.manifest,
            r.model,
            r.p,
            r.q,
            r.clause,
            opt(&r.analytic_as),
            label(&r.empirical_w),
            opt(&r.analytic_series),
            label(&r.empirical_expectation),
            r.contradiction
        );
    }
    s
}

/// Consolidates manifests into one table. Exit status 1 when any row is a hard
/// contradiction, 0 otherwise (including the empty set).
pub fn cmd_report(
    manifests: &[PathBuf],
    out: Option<&Path>,
    format: Format,
) -> Result<(Vec<ReportRow>, i32)> {
    let opts = CriteriaOptions::default();
    let rows = manifests
        .iter()
        .map(|m| report_row(m, &opts))
        .collect::<Result<Vec<_>>>()?;
    let (name, bytes) = match format {
        Format::Csv => ("report.csv", rows_to_csv(&rows).into_bytes()),
        Format::Json => ("report.json", to_json(&rows)),
    };
    match out {
        Some(dir) => {
            let mut stage = Staging::new(dir)?;
            stage.write(name, &bytes)?;
            stage.commit()?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    let code = if rows.iter().any(|r| r.contradiction) {
        1
    } else {
        0
    };
    Ok((rows, code))
}

/// Size of each run in the built-in matrix.
#[derive(Debug, Clone, Copy)]
pub struct MatrixSettings {
    pub n_max: u64,
    pub replications: usize,
    pub master_seed: u64,
}

impl Default for MatrixSettings {
    fn default() -> Self {
        Self {
            n_max: 1 << 14,
            replications: 64,
            master_seed: 2024,
        }
    }
}

/// Built-in models crossed with the in-scope clause grid.
pub fn builtin_matrix() -> Vec<(BuiltinSpec, f64, f64)> {
    use BuiltinSpec::*;
    vec![
        (LogSquared { p: 0.5, q: 0.5 }, 0.5, 0.5),
        (LogSquared { p: 0.5, q: 0.25 }, 0.5, 0.25),
        (LogSquared { p: 0.5, q: 0.4 }, 0.5, 0.4),
        (LogLoglog { p: 0.5 }, 0.5, 0.5),
        (LogLoglog { p: 0.5 }, 0.5, 0.25),
        (CriticalPower { p: 0.5 }, 0.5, 0.5),
        (CriticalPower { p: 0.5 }, 0.5, 0.25),
        (Pareto { alpha: 2.0 }, 0.5, 0.25),
        (Pareto { alpha: 2.0 }, 1.0, 0.5),
        (Pareto { alpha: 2.0 }, 1.5, 0.5),
        (Rademacher, 0.5, 0.25),
        (Rademacher, 1.0, 0.5),
        (Rademacher, 1.5, 0.5),
        (Degenerate { c: 1.0 }, 0.5, 0.5),
        (Degenerate { c: 1.0 }, 1.5, 0.5),
        (Zero, 0.5, 0.5),
        (Zero, 1.5, 0.5),
    ]
}

/// Simulates every matrix entry into `out/NN/` and returns the manifest paths.
pub fn run_matrix(out: &Path, settings: MatrixSettings, workers: Option<usize>) -> Result<Vec<PathBuf>> {
    builtin_matrix()
        .into_iter()
        .enumerate()
        .map(|(i, (spec, p, q))| {
            let cfg = SimulateConfig {
                schema: SCHEMA_VERSION,
                experiment: ExperimentConfig {
                    sequence: SequenceSpec::Iid {
                        model: ModelRef::Builtin { spec, sign_law: None },
                    },
                    p,
                    q,
                    n_max: settings.n_max,
                    replications: settings.replications,
                    master_seed: settings.master_seed,
                    checkpoints: None,
                    epsilon_grid: Vec::new(),
                    mode: Mode::Plain,
                },
            };
            cfg.experiment.validate()?;
            let dir = out.join(format!("{i:02}"));
            simulate_config(cfg, None, &dir, workers, Format::Csv)?;
            Ok(dir.join(MANIFEST_FILE))
        })
        .collect()
}
