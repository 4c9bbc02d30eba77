use std::path::Path;

use clap::ValueEnum;
use pq_slln::banach_lp::{marcus_pisier_check, MarcusPisierReport};
use pq_slln::oracles::{
    lemma_max_lattice, small_series_check, symmetrization_lattice, DiscreteLaw, LatticeReport,
    SmallSeriesCheck, MAX_EXACT_N,
};
use pq_slln::tail_models::TailModel;
use serde::Serialize;

use crate::error::Result;
use crate::output::{to_json, Staging};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemmas,
    MarcusPisier,
    SmallSeries,
    All,
}

/// Monte Carlo sizes of the verification suites.
#[derive(Debug, Clone, Copy)]
pub struct VerifySettings {
    pub seed: u64,
    pub lemma_n_max: u32,
    pub random_laws: usize,
    pub mp_replications: usize,
    pub series_replications: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            seed: 20_240_607,
            lemma_n_max: 1 << 10,
            random_laws: 100,
            mp_replications: 100_000,
            series_replications: 100_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub lemmas: Vec<LatticeReport>,
    pub marcus_pisier: Vec<MarcusPisierReport>,
    pub small_series: Vec<SmallSeriesCheck>,
    pub holds: bool,
}

pub const MP_U_GRID: [f64; 9] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1e3, 1e4];
pub const SERIES_GRID: [(f64, f64); 4] = [(1.0, 0.5), (1.0, 1.0), (1.5, 0.5), (1.5, 1.0)];

pub fn lemma_suite(s: &VerifySettings) -> Result<Vec<LatticeReport>> {
    Ok(vec![
        lemma_max_lattice(s.lemma_n_max)?,
        symmetrization_lattice(s.random_laws, s.seed)?,
    ])
}

pub fn marcus_pisier_suite(s: &VerifySettings, workers: Option<usize>) -> Result<Vec<MarcusPisierReport>> {
    let cases = [
        (TailModel::pareto(1.5), 1.2),
        (TailModel::degenerate(1.0), 1.0),
        (TailModel::rademacher(), 1.5),
    ];
    cases
        .iter()
        .map(|(m, r)| {
            Ok(marcus_pisier_check(
                m,
                64,
                *r,
                &MP_U_GRID,
                s.mp_replications,
                s.seed,
                workers,
            )?)
        })
        .collect()
}

pub fn small_series_suite(s: &VerifySettings, workers: Option<usize>) -> Result<Vec<SmallSeriesCheck>> {
    let model = TailModel::rademacher();
    let law = DiscreteLaw::rademacher();
    SERIES_GRID
        .iter()
        .map(|&(p, q)| {
            Ok(small_series_check(
                &model,
                &law,
                p,
                q,
                MAX_EXACT_N,
                s.series_replications,
                s.seed,
                workers,
            )?)
        })
        .collect()
}

pub fn run_suite(suite: Suite, s: &VerifySettings, workers: Option<usize>) -> Result<VerifyReport> {
    let want = |x: Suite| suite == Suite::All || suite == x;
    let lemmas = if want(Suite::Lemmas) {
        lemma_suite(s)?
    } else {
        Vec::new()
    };
    let marcus_pisier = if want(Suite::MarcusPisier) {
        marcus_pisier_suite(s, workers)?
    } else {
        Vec::new()
    };
    let small_series = if want(Suite::SmallSeries) {
        small_series_suite(s, workers)?
    } else {
        Vec::new()
    };
    let holds = lemmas.iter().all(|l| l.holds())
        && marcus_pisier.iter().all(|m| m.holds())
        && small_series.iter().all(|c| c.holds());
    Ok(VerifyReport {
        suite,
        lemmas,
        marcus_pisier,
        small_series,
        holds,
    })
}

/// Runs a suite; exit status 0 iff every inequality holds, 1 otherwise.
pub fn cmd_verify(
    suite: Suite,
    settings: &VerifySettings,
    out: Option<&Path>,
    workers: Option<usize>,
) -> Result<(VerifyReport, i32)> {
    let report = run_suite(suite, settings, workers)?;
    let bytes = to_json(&report);
    match out {
        Some(dir) => {
            let mut stage = Staging::new(dir)?;
            stage.write("verify.json", &bytes)?;
            stage.commit()?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    let code = if report.holds { 0 } else { 1 };
    Ok((report, code))
}
