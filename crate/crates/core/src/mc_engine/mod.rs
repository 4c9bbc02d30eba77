//! Deterministic parallel Monte Carlo over independent summands.
//!
//! Replication `r` draws from ChaCha8 seeded with `mix(master_seed, r)`; the plain,
//! independent-copy and block streams are separate ChaCha streams of that seed. Results
//! are collected in replication order, so tables do not depend on the worker count.
//! All verdicts here are finite-window evidence.

pub mod config;
pub mod engine;
pub mod growth;
pub mod rng;
pub mod sequence;
pub mod stats;

pub use config::{dyadic_grid, ExperimentConfig, Mode, SequenceSpec, Threshold, MIN_N_MAX};
pub use engine::{
    etemadi_blocks, harmonic_weight, run_paths, run_sequence, symmetrize_run, truncated_component_series,
    with_workers, CheckpointRow, CheckpointTable, EtemadiReport, EtemadiRow, ReplicationPath,
    TruncatedReport, TruncatedRow, CSV_HEADER, OVERFLOW_LIMIT,
};
pub use growth::{growth_verdict, GrowthSeries, GROWTH_WINDOW};
pub use rng::{mix, replication_rng, splitmix64, Stream};
pub use sequence::{IidReal, Sequence};
pub use stats::{
    dispersion_ratio, estimate_series_expectation, pathwise_w_series, summarize, window_exponent_gap,
    Moments, SeriesEstimate, SimulationSummary, DISPERSION_LIMIT, EXPONENT_GAP_LIMIT,
};
