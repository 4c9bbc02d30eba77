use std::path::{Path, PathBuf};
use std::time::Instant;

use pq_slln::mc_engine::{
    etemadi_blocks, run_paths, summarize, symmetrize_run, truncated_component_series, Mode,
};
use serde::Serialize;

use crate::config::SimulateConfig;
use crate::error::Result;
use crate::manifest::{load_simulate_input, RunManifest, MANIFEST_FILE};
use crate::output::{to_json, Staging};
use crate::Format;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub format: Format,
}

#[derive(Serialize)]
struct Censoring<'a> {
    replications: usize,
    censored: &'a [(usize, u64)],
}

/// Runs the experiment in `args.config` and writes the checkpoint table, summary,
/// censoring report, optional block and truncated-series reports, and the manifest.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<RunManifest> {
    let mut cfg = load_simulate_input(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.experiment.master_seed = seed;
    }
    cfg.experiment.checkpoints = Some(cfg.experiment.resolved_checkpoints());
    simulate_config(cfg, Some(&args.config), &args.out, args.workers, args.format)
}

pub fn simulate_config(
    cfg: SimulateConfig,
    config_path: Option<&Path>,
    out: &Path,
    workers: Option<usize>,
    format: Format,
) -> Result<RunManifest> {
    let start = Instant::now();
    let exp = &cfg.experiment;
    let table = match exp.mode {
        Mode::Symmetrized => symmetrize_run(exp, workers)?,
        _ => run_paths(exp, workers)?,
    };
    let summary = summarize(&table, exp);
    let mut stage = Staging::new(out)?;
    let mut outputs = Vec::new();
    let mut put = |stage: &mut Staging, name: &str, bytes: Vec<u8>| -> Result<()> {
        stage.write(name, &bytes)?;
        outputs.push(name.to_string());
        Ok(())
    };
    match format {
        Format::Csv => put(&mut stage, "paths.csv", table.to_csv_string().into_bytes())?,
        Format::Json => put(&mut stage, "paths.json", to_json(&table))?,
    }
    put(&mut stage, SUMMARY_FILE, to_json(&summary))?;
    put(
        &mut stage,
        "censoring.json",
        to_json(&Censoring {
            replications: table.paths.len(),
            censored: &summary.censored,
        }),
    )?;
    if !exp.epsilon_grid.is_empty() {
        put(
            &mut stage,
            "etemadi.json",
            to_json(&etemadi_blocks(exp, workers)?),
        )?;
    }
    if let Mode::Truncated { .. } = exp.mode {
        put(
            &mut stage,
            "truncated.json",
            to_json(&truncated_component_series(exp, workers)?),
        )?;
    }
    outputs.push(MANIFEST_FILE.into());
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config_path: config_path.map(|p| p.display().to_string()),
        master_seed: cfg.experiment.master_seed,
        config: cfg,
        workers,
        outputs,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    stage.write(MANIFEST_FILE, &to_json(&manifest))?;
    stage.commit()?;
    Ok(manifest)
}
