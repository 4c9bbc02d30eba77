use serde::{Deserialize, Serialize};

use super::law::DiscreteLaw;
use super::series::exact_series_small;
use crate::error::Result;
use crate::mc_engine::{run_sequence, ExperimentConfig, IidReal, Moments, SequenceSpec, MIN_N_MAX};
use crate::tail_models::{ModelRef, TailModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallSeriesRow {
    pub n: u32,
    pub exact: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    /// `|mc_mean - exact| / mc_se`, 0 when both agree exactly.
    pub z: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallSeriesCheck {
    pub model: String,
    pub p: f64,
    pub q: f64,
    pub replications: usize,
    pub rows: Vec<SmallSeriesRow>,
}

impl SmallSeriesCheck {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

#[allow(clippy::too_many_arguments)]
/// Compares Monte Carlo `E r_n^q` for `model` with exact values from `law`, which must
/// describe the same distribution, for `n = 1..=n_limit`. Agreement means within four
/// standard errors.
pub fn small_series_check(
    model: &TailModel,
    law: &DiscreteLaw,
    p: f64,
    q: f64,
    n_limit: u32,
    replications: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<SmallSeriesCheck> {
    let exact = exact_series_small(law, p, q, n_limit)?;
    let cfg = ExperimentConfig {
        sequence: SequenceSpec::Iid {
            model: ModelRef::Custom(model.to_document()),
        },
        p,
        q,
        n_max: MIN_N_MAX,
        replications,
        master_seed: seed,
        checkpoints: Some((1..=n_limit as u64).collect()),
        epsilon_grid: Vec::new(),
        mode: Default::default(),
    };
    cfg.validate()?;
    let table = run_sequence(&IidReal { model }, &cfg, workers, false)?;
    let rows = exact
        .iter()
        .map(|e| {
            let m = Moments::of(&table.column_at(e.n as u64, |r| r.ratio.powf(q)));
            let diff = (m.mean - e.moment).abs();
            let z = if diff <= 1e-12 * e.moment.abs().max(1.0) {
                0.0
            } else {
                diff / m.se
            };
            SmallSeriesRow {
                n: e.n,
                exact: e.moment,
                mc_mean: m.mean,
                mc_se: m.se,
                z,
                holds: z <= 4.0,
            }
        })
        .collect();
    Ok(SmallSeriesCheck {
        model: model.name.clone(),
        p,
        q,
        replications,
        rows,
    })
}
