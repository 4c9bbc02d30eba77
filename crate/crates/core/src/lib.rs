//! Numerical laboratory for (p,q)-type strong laws of large numbers.
//!
//! The crate is organised bottom-up:
//!
//! * [`tail_models`] exact survival functions, quantiles, sampling and truncated moments;
//! * [`criteria`] convergence verdicts for the analytic membership conditions;
//! * [`mc_engine`] deterministic parallel Monte Carlo of normed partial sums;
//! * [`banach_lp`] finite-support `l_p` vectors and the disjoint-coordinate counterexample;
//! * [`oracles`] exact enumeration checks on small discrete laws.

// NaN must fail range checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

pub mod banach_lp;
pub mod criteria;
pub mod error;
pub mod mc_engine;
pub mod numeric;
pub mod oracles;
pub mod tail_models;

pub use error::{Error, Result};
